package java.lang;

public class String {
    public int length() {
        return 0;
    }
}
