package app;

import java.lang.Integer;
import java.lang.String;
import java.util.ArrayList;
import java.util.HashMap;

class Usage {
    String toString(Integer value) {
        return null;
    }

    void run() {
        Integer i = null;
        String str;
        str = toString(i);
        HashMap map = new HashMap();
        int s = map.size();
        map.put(str, i);
        ArrayList items = new ArrayList();
        items.add(str);
        boolean ok = items.add("fixed");
        this.helper(i);
    }

    void helper(Integer value) {
    }
}
