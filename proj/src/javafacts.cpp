#include "coordterm/javafacts.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "java_lexer.hpp"

namespace coordterm {

using javalex::Tok;

std::string label_of(const std::string& qualified) {
  const auto pos = qualified.rfind('.');
  return pos == std::string::npos ? qualified : qualified.substr(pos + 1);
}

std::string package_of(const std::string& qualified) {
  const auto pos = qualified.rfind('.');
  return pos == std::string::npos ? std::string() : qualified.substr(0, pos);
}

const ClassEntry* CodeFacts::find(const std::string& qualified) const {
  auto it = classes.find(qualified);
  return it == classes.end() ? nullptr : &it->second;
}

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_primitive(const std::string& name) {
  static const std::set<std::string> prims = {"int",   "long",   "short",   "byte",  "char",
                                              "float", "double", "boolean", "void",  "var"};
  return prims.count(name) > 0;
}

bool is_modifier(const std::string& name) {
  static const std::set<std::string> mods = {
      "public",    "private",   "protected", "static",   "final",  "abstract",
      "synchronized", "native", "transient", "volatile", "strictfp", "default"};
  return mods.count(name) > 0;
}

struct RawParam {
  std::string type;
  std::string name;
};

struct RawMethod {
  std::string name;
  std::vector<RawParam> params;
  std::vector<Tok> body;
};

struct RawFile {
  std::string package;
  std::map<std::string, std::string> imports;  // simple name -> qualified
};

struct RawClass {
  std::string qualified;
  std::string simple;
  ClassEntry::Kind kind = ClassEntry::Kind::Class;
  std::vector<std::string> super_names;  // raw extends targets
  std::vector<std::string> iface_names;  // raw implements (or interface extends)
  std::map<std::string, std::string> fields;  // name -> raw type
  std::vector<RawMethod> methods;
  std::size_t file_index = 0;
};

// ---------------------------------------------------------------------------
// Pass 1: per-file syntax into the raw representation
// ---------------------------------------------------------------------------

class FileParser {
 public:
  FileParser(std::string name, const std::string& source)
      : name_(std::move(name)), toks_(javalex::lex(source)) {}

  void parse(RawFile& file, std::vector<RawClass>& classes, std::size_t file_index) {
    file_index_ = file_index;
    if (peek().is("package")) {
      next();
      file.package = parse_qualified_name();
      expect_punct(";");
    }
    while (peek().is("import")) {
      next();
      if (peek().is("static")) next();
      std::string name = parse_qualified_name();
      if (peek().punct(".")) {  // wildcard import: parsed, not used for resolution
        next();
        expect_punct("*");
        name.clear();
      }
      if (!name.empty()) file.imports[label_of(name)] = name;
      expect_punct(";");
    }
    while (!at_end()) {
      skip_decorations();
      if (at_end()) break;
      parse_type_decl(file, classes, "");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(name_ + ":" + std::to_string(peek().line) + ": " + msg);
  }

  const Tok& peek(int k = 0) const {
    const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Tok& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::Kind::End; }

  void expect_punct(const char* s) {
    if (!peek().punct(s)) fail(std::string("expected '") + s + "', got '" + peek().text + "'");
    next();
  }
  std::string expect_ident() {
    if (!peek().ident()) fail("expected identifier, got '" + peek().text + "'");
    return next().text;
  }

  std::string parse_qualified_name() {
    std::string name = expect_ident();
    while (peek().punct(".") && peek(1).ident()) {
      next();
      name += "." + expect_ident();
    }
    return name;
  }

  void skip_generics() {
    if (!peek().punct("<")) return;
    int depth = 0;
    while (!at_end()) {
      if (peek().punct("<")) ++depth;
      if (peek().punct(">")) {
        --depth;
        next();
        if (depth == 0) return;
        continue;
      }
      next();
    }
    fail("unbalanced '<'");
  }

  void skip_balanced(const char* open, const char* close) {
    int depth = 0;
    while (!at_end()) {
      if (peek().punct(open)) ++depth;
      if (peek().punct(close)) {
        --depth;
        next();
        if (depth == 0) return;
        continue;
      }
      next();
    }
    fail(std::string("unbalanced '") + open + "'");
  }

  // annotations and modifiers before a declaration
  void skip_decorations() {
    for (;;) {
      if (peek().punct("@") && peek(1).ident() && !peek(1).is("interface")) {
        next();
        parse_qualified_name();
        if (peek().punct("(")) skip_balanced("(", ")");
        continue;
      }
      if (peek().ident() && is_modifier(peek().text)) {
        next();
        continue;
      }
      return;
    }
  }

  // Type arguments are stripped; array brackets are dropped so the base name
  // is what resolution sees. Returns the dotted base name.
  std::string parse_type() {
    std::string base = expect_ident();
    if (peek().punct("<")) skip_generics();
    while (peek().punct(".") && peek(1).ident()) {
      next();
      base += "." + expect_ident();
      if (peek().punct("<")) skip_generics();
    }
    while (peek().punct("[") && peek(1).punct("]")) {
      next();
      next();
    }
    return base;
  }

  std::vector<RawParam> parse_params() {
    expect_punct("(");
    std::vector<RawParam> params;
    if (peek().punct(")")) {
      next();
      return params;
    }
    for (;;) {
      skip_decorations();
      RawParam p;
      p.type = parse_type();
      if (peek().punct("...")) next();
      p.name = expect_ident();
      while (peek().punct("[") && peek(1).punct("]")) {
        next();
        next();
      }
      params.push_back(std::move(p));
      if (peek().punct(",")) {
        next();
        continue;
      }
      expect_punct(")");
      return params;
    }
  }

  void skip_throws() {
    if (!peek().is("throws")) return;
    next();
    parse_type();
    while (peek().punct(",")) {
      next();
      parse_type();
    }
  }

  std::vector<Tok> capture_block() {
    expect_punct("{");
    std::vector<Tok> body;
    int depth = 1;
    while (!at_end()) {
      if (peek().punct("{")) ++depth;
      if (peek().punct("}")) {
        --depth;
        if (depth == 0) {
          next();
          return body;
        }
      }
      body.push_back(next());
    }
    fail("unbalanced '{'");
  }

  // Skips one field initializer expression: everything until a ',' or ';' at
  // paren/bracket/brace depth zero.
  void skip_initializer() {
    int depth = 0;
    while (!at_end()) {
      const Tok& t = peek();
      if (t.punct("(") || t.punct("[") || t.punct("{")) ++depth;
      if (t.punct(")") || t.punct("]") || t.punct("}")) --depth;
      if (depth == 0 && (t.punct(",") || t.punct(";"))) return;
      next();
    }
  }

  void parse_type_decl(RawFile& file, std::vector<RawClass>& classes,
                       const std::string& enclosing) {
    if (peek().punct("@") && peek(1).is("interface")) {  // annotation declaration
      next();
      next();
      expect_ident();
      skip_balanced("{", "}");
      return;
    }
    const bool is_enum = peek().is("enum");
    const bool is_interface = peek().is("interface");
    if (!peek().is("class") && !is_interface && !is_enum)
      fail("expected type declaration, got '" + peek().text + "'");
    next();

    RawClass rc;
    rc.file_index = file_index_;
    rc.kind = is_interface ? ClassEntry::Kind::Interface : ClassEntry::Kind::Class;
    rc.simple = expect_ident();
    rc.qualified = enclosing.empty()
                       ? (file.package.empty() ? rc.simple : file.package + "." + rc.simple)
                       : enclosing + "$" + rc.simple;
    skip_generics();

    if (peek().is("extends")) {
      next();
      if (is_interface) {
        rc.iface_names.push_back(parse_type());
        while (peek().punct(",")) {
          next();
          rc.iface_names.push_back(parse_type());
        }
      } else {
        rc.super_names.push_back(parse_type());
      }
    }
    if (peek().is("implements")) {
      next();
      rc.iface_names.push_back(parse_type());
      while (peek().punct(",")) {
        next();
        rc.iface_names.push_back(parse_type());
      }
    }

    if (is_enum) {  // header only; the body is out of the supported subset
      skip_balanced("{", "}");
      classes.push_back(std::move(rc));
      return;
    }

    expect_punct("{");
    while (!peek().punct("}")) {
      if (at_end()) fail("unterminated class body");
      parse_member(file, classes, rc);
    }
    next();
    classes.push_back(std::move(rc));
  }

  void parse_member(RawFile& file, std::vector<RawClass>& classes, RawClass& rc) {
    skip_decorations();
    if (peek().punct(";")) {
      next();
      return;
    }
    if (peek().punct("{")) {  // instance/static initializer: not scanned
      skip_balanced("{", "}");
      return;
    }
    if (peek().is("class") || peek().is("interface") || peek().is("enum") ||
        (peek().punct("@") && peek(1).is("interface"))) {
      parse_type_decl(file, classes, rc.qualified);
      return;
    }
    if (peek().punct("<")) skip_generics();  // generic method type parameters

    // constructor
    if (peek().ident() && peek().text == rc.simple && peek(1).punct("(")) {
      RawMethod m;
      m.name = next().text;
      m.params = parse_params();
      skip_throws();
      if (peek().punct(";"))
        next();
      else
        m.body = capture_block();
      rc.methods.push_back(std::move(m));
      return;
    }

    const std::string type = parse_type();
    const std::string name = expect_ident();
    if (peek().punct("(")) {
      RawMethod m;
      m.name = name;
      m.params = parse_params();
      skip_throws();
      if (peek().punct(";"))
        next();
      else
        m.body = capture_block();
      rc.methods.push_back(std::move(m));
      return;
    }

    // field declaration, possibly with several declarators
    rc.fields[name] = type;
    for (;;) {
      if (peek().punct("=")) {
        next();
        skip_initializer();
      }
      if (peek().punct(",")) {
        next();
        std::string more = expect_ident();
        while (peek().punct("[") && peek(1).punct("]")) {
          next();
          next();
        }
        rc.fields[more] = type;
        continue;
      }
      expect_punct(";");
      return;
    }
  }

  std::string name_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::size_t file_index_ = 0;
};

// ---------------------------------------------------------------------------
// Pass 2: resolution and context counting
// ---------------------------------------------------------------------------

struct Resolver {
  CodeFacts& facts;
  const std::vector<RawFile>& files;
  std::map<std::pair<std::string, std::string>, std::string> by_package;  // (pkg,label)->q

  std::string ensure_external(const std::string& qualified) {
    if (facts.classes.find(qualified) == facts.classes.end()) {
      ClassEntry e;
      e.qualified_name = qualified;
      e.label = label_of(qualified);
      e.package = package_of(qualified);
      e.kind = ClassEntry::Kind::Class;
      e.external = true;
      facts.classes[qualified] = std::move(e);
    }
    return qualified;
  }

  // locals > parameters > fields happen in the body scanner; this is the
  // type-name half: single-type imports > same package > external stub.
  // Primitives resolve to nothing. Returns "" when not a class type.
  std::string resolve_type_name(const std::string& raw, const RawFile& file) {
    if (raw.empty() || is_primitive(raw)) return "";
    if (raw.find('.') != std::string::npos) {
      if (facts.classes.count(raw)) return raw;
      return ensure_external(raw);
    }
    if (auto it = file.imports.find(raw); it != file.imports.end()) {
      if (facts.classes.count(it->second)) return it->second;
      return ensure_external(it->second);
    }
    if (auto it = by_package.find({file.package, raw}); it != by_package.end())
      return it->second;
    return ensure_external(raw);
  }

  // Lookup-only variant for invocation receivers: an unknown bare identifier
  // must not fabricate a class node.
  std::string lookup_type_name(const std::string& raw, const RawFile& file) const {
    if (raw.empty() || is_primitive(raw)) return "";
    if (facts.classes.count(raw)) return raw;
    if (auto it = file.imports.find(raw); it != file.imports.end())
      return facts.classes.count(it->second) ? it->second : "";
    if (auto it = by_package.find({file.package, raw}); it != by_package.end())
      return it->second;
    return "";
  }

  bool defined(const std::string& qualified) const {
    auto it = facts.classes.find(qualified);
    return it != facts.classes.end() && !it->second.external;
  }
};

bool is_control_keyword(const std::string& s) {
  static const std::set<std::string> kws = {"if",    "for",   "while", "switch",
                                            "catch", "synchronized", "return", "new",
                                            "throw", "do",    "else",  "try",
                                            "break", "continue", "assert", "instanceof"};
  return kws.count(s) > 0;
}

class BodyScanner {
 public:
  BodyScanner(Resolver& resolver, const RawClass& owner, const RawFile& file,
              const RawMethod& method)
      : resolver_(resolver), owner_(owner), file_(file) {
    for (const auto& p : method.params) params_[p.name] = p.type;
  }

  void scan(const std::vector<Tok>& body) {
    if (!body.empty()) scan_statements(body.data(), body.data() + body.size());
  }

 private:
  using It = const Tok*;

  std::string var_type(const std::string& name) const {
    if (auto it = locals_.find(name); it != locals_.end()) return it->second;
    if (auto it = params_.find(name); it != params_.end()) return it->second;
    if (auto it = owner_.fields.find(name); it != owner_.fields.end()) return it->second;
    return "";
  }

  void count(const std::string& qualified, const std::string& context) {
    if (qualified.empty() || !resolver_.defined(qualified)) return;
    ++resolver_.facts.contexts[qualified][context];
  }

  static It find_matching(It open, It end, const char* o, const char* c) {
    int depth = 0;
    for (It p = open; p != end; ++p) {
      if (p->punct(o)) ++depth;
      if (p->punct(c)) {
        --depth;
        if (depth == 0) return p;
      }
    }
    return end;
  }

  static It find_statement_end(It begin, It end) {
    int depth = 0;
    for (It p = begin; p != end; ++p) {
      if (p->punct("(") || p->punct("[") || p->punct("{")) ++depth;
      if (p->punct(")") || p->punct("]") || p->punct("}")) --depth;
      if (depth <= 0 && p->punct(";")) return p;
    }
    return end;
  }

  void scan_statements(It begin, It end) {
    It i = begin;
    while (i < end) {
      if (i->punct("{") || i->punct("}") || i->punct(";")) {
        ++i;
        continue;
      }
      if (i->ident() && (i + 1) < end && (i + 1)->punct("(") &&
          (i->is("for") || i->is("try") || i->is("catch") || i->is("if") ||
           i->is("while") || i->is("switch") || i->is("synchronized"))) {
        const It open = i + 1;
        const It close = find_matching(open, end, "(", ")");
        if (close == end) return;
        if (i->is("for") || i->is("try"))
          scan_header_region(open + 1, close);
        else if (i->is("catch"))
          scan_catch_region(open + 1, close);
        else
          expression_scan(open + 1, close);
        i = close + 1;
        continue;
      }
      if (i->is("return") || i->is("throw")) {
        const It stop = find_statement_end(i + 1, end);
        expression_scan(i + 1, stop);
        i = stop < end ? stop + 1 : end;
        continue;
      }
      if (i->ident() && (i->is("else") || i->is("do") || i->is("finally") ||
                         i->is("break") || i->is("continue") || is_modifier(i->text))) {
        ++i;
        continue;
      }
      if (It after = try_local_decl(i, end); after != nullptr) {
        i = after;
        continue;
      }
      const It stop = find_statement_end(i, end);
      expression_scan(i, stop);
      i = stop < end ? stop + 1 : end;
    }
  }

  // for-init and try-with-resources: an optional declaration, then the rest
  // of the header is plain expression territory.
  void scan_header_region(It begin, It end) {
    It rest = begin;
    if (It after = try_local_decl(begin, end); after != nullptr) rest = after;
    expression_scan(rest, end);
  }

  void scan_catch_region(It begin, It end) {
    It p = begin;
    while (p < end && p->ident() && is_modifier(p->text)) ++p;
    std::string type;
    It q = parse_type_tokens(p, end, type);
    if (q != nullptr && q < end && q->ident()) locals_[q->text] = type;
  }

  // Parses Ident(.Ident)* with generic/array strips. Returns the position
  // after the type, or nullptr when `p` does not start a type.
  static It parse_type_tokens(It p, It end, std::string& base) {
    if (p >= end || !p->ident() || is_control_keyword(p->text)) return nullptr;
    base = p->text;
    ++p;
    if (p < end && p->punct("<")) p = skip_angle(p, end);
    while (p + 1 < end && p->punct(".") && (p + 1)->ident()) {
      base += "." + (p + 1)->text;
      p += 2;
      if (p < end && p->punct("<")) p = skip_angle(p, end);
    }
    while (p + 1 < end && p->punct("[") && (p + 1)->punct("]")) p += 2;
    return p;
  }

  static It skip_angle(It p, It end) {
    int depth = 0;
    for (It q = p; q != end; ++q) {
      if (q->punct("<")) ++depth;
      if (q->punct(">")) {
        --depth;
        if (depth == 0) return q + 1;
      }
    }
    return end;
  }

  // Local variable declaration: Type Name followed by '=', ',', ';' or ':'.
  // Returns the position after the declaration statement or nullptr.
  It try_local_decl(It begin, It end) {
    std::string base;
    It p = parse_type_tokens(begin, end, base);
    if (p == nullptr || p >= end || !p->ident() || is_control_keyword(p->text))
      return nullptr;
    const std::string name = p->text;
    It q = p + 1;
    if (q >= end) return nullptr;
    if (q->punct(":")) {  // for-each header
      locals_[name] = base;
      return q + 1;
    }
    if (!q->punct("=") && !q->punct(",") && !q->punct(";")) return nullptr;

    locals_[name] = base;
    for (;;) {
      if (q >= end) return end;
      if (q->punct(";")) return q + 1;
      if (q->punct("=")) {
        It stop = q + 1;
        int depth = 0;
        while (stop < end) {
          if (stop->punct("(") || stop->punct("[") || stop->punct("{")) ++depth;
          if (stop->punct(")") || stop->punct("]") || stop->punct("}")) --depth;
          if (depth <= 0 && (stop->punct(",") || stop->punct(";"))) break;
          ++stop;
        }
        expression_scan(q + 1, stop);
        q = stop;
        continue;
      }
      if (q->punct(",")) {
        ++q;
        if (q >= end || !q->ident()) return q;
        locals_[q->text] = base;
        ++q;
        continue;
      }
      return q;  // e.g. ')' in a resource header
    }
  }

  // Static type of one invocation argument, when it is trivially known:
  // a plain variable, a literal, `this`, or `new T(...)`.
  std::string type_of_arg(It begin, It end) {
    if (begin >= end) return "";
    if (end - begin == 1) {
      const Tok& t = *begin;
      switch (t.kind) {
        case Tok::Kind::Str:
          return resolver_.resolve_type_name("String", file_);
        case Tok::Kind::Char:
          return resolver_.resolve_type_name("Character", file_);
        case Tok::Kind::Number: {
          const bool decimal =
              t.text.find('.') != std::string::npos ||
              (t.text.rfind("0x", 0) != 0 && t.text.rfind("0X", 0) != 0 &&
               t.text.find_first_of("eEfFdD") != std::string::npos);
          return resolver_.resolve_type_name(decimal ? "Double" : "Integer", file_);
        }
        case Tok::Kind::Ident: {
          if (t.text == "true" || t.text == "false")
            return resolver_.resolve_type_name("Boolean", file_);
          if (t.text == "null") return "";
          if (t.text == "this") return owner_.qualified;
          const std::string raw = var_type(t.text);
          return raw.empty() ? "" : resolver_.resolve_type_name(raw, file_);
        }
        default:
          return "";
      }
    }
    if (begin->is("new")) {
      std::string base;
      It p = parse_type_tokens(begin + 1, end, base);
      if (p != nullptr && p < end && p->punct("(") &&
          find_matching(p, end, "(", ")") == end - 1)
        return resolver_.resolve_type_name(base, file_);
    }
    return "";
  }

  std::string resolve_receiver(const std::vector<std::string>& segments) {
    if (segments.empty()) return "";
    if (segments.size() == 1 && segments[0] == "this") return owner_.qualified;
    if (segments[0] == "this") {
      if (segments.size() != 2) return "";
      const std::string raw = owner_.fields.count(segments[1])
                                  ? owner_.fields.at(segments[1])
                                  : std::string();
      return raw.empty() ? "" : resolver_.resolve_type_name(raw, file_);
    }
    if (segments.size() == 1) {
      const std::string raw = var_type(segments[0]);
      if (!raw.empty()) return resolver_.resolve_type_name(raw, file_);
      return resolver_.lookup_type_name(segments[0], file_);  // static call
    }
    std::string joined = segments[0];
    for (std::size_t i = 1; i < segments.size(); ++i) joined += "." + segments[i];
    return resolver_.lookup_type_name(joined, file_);
  }

  void expression_scan(It begin, It end) {
    It i = begin;
    while (i < end) {
      if (!(i->ident() && (i + 1) < end && (i + 1)->punct("(") &&
            !is_control_keyword(i->text))) {
        ++i;
        continue;
      }
      const std::string method = i->text;
      const It open = i + 1;
      const It close = find_matching(open, end, "(", ")");
      if (close == end) return;

      // walk the receiver chain backwards: seg(.seg)*.method(
      It chain_start = i;
      while (chain_start - begin >= 2 && (chain_start - 1)->punct(".") &&
             (chain_start - 2)->ident())
        chain_start -= 2;
      const bool has_prev = chain_start - begin >= 1;
      const bool is_ctor = has_prev && (chain_start - 1)->is("new");
      const bool broken_chain = !is_ctor && has_prev && (chain_start - 1)->punct(".");

      if (!is_ctor && !broken_chain) {
        std::vector<std::string> segments;
        for (It p = chain_start; p < i; p += 2) segments.push_back(p->text);
        const std::string receiver = resolve_receiver(segments);
        if (!receiver.empty()) count(receiver, "API-" + method);
      }

      // arguments: top-level comma segments inside the parens
      It seg_start = open + 1;
      int depth = 0;
      for (It p = open + 1; p <= close; ++p) {
        const bool at_close = p == close;
        if (!at_close && (p->punct("(") || p->punct("[") || p->punct("{"))) ++depth;
        if (!at_close && (p->punct(")") || p->punct("]") || p->punct("}"))) --depth;
        if (at_close || (depth == 0 && p->punct(","))) {
          if (seg_start < p) {
            if (!is_ctor) {
              const std::string arg_type = type_of_arg(seg_start, p);
              if (!arg_type.empty()) count(arg_type, "ARG-" + method);
            }
            expression_scan(seg_start, p);
          }
          seg_start = p + 1;
        }
      }
      i = close + 1;
    }
  }

  Resolver& resolver_;
  const RawClass& owner_;
  const RawFile& file_;
  std::map<std::string, std::string> params_;
  std::map<std::string, std::string> locals_;
};

}  // namespace

CodeFacts parse_java_sources(
    const std::vector<std::pair<std::string, std::string>>& named_sources,
    std::ostream* diagnostics) {
  std::vector<RawFile> files;
  std::vector<RawClass> raw_classes;
  for (const auto& [name, content] : named_sources) {
    RawFile file;
    std::vector<RawClass> classes;
    try {
      FileParser parser(name, content);
      parser.parse(file, classes, files.size());
    } catch (const ParseError& e) {
      if (diagnostics) *diagnostics << "warning: skipping " << name << ": " << e.what() << "\n";
      continue;
    }
    files.push_back(std::move(file));
    for (auto& rc : classes) raw_classes.push_back(std::move(rc));
  }

  CodeFacts facts;
  for (const auto& rc : raw_classes) {
    if (facts.classes.count(rc.qualified)) {
      if (diagnostics)
        *diagnostics << "warning: duplicate class " << rc.qualified << ", keeping first\n";
      continue;
    }
    ClassEntry e;
    e.qualified_name = rc.qualified;
    e.label = label_of(rc.qualified);
    e.package = package_of(rc.qualified);
    e.kind = rc.kind;
    facts.classes[rc.qualified] = std::move(e);
    facts.contexts[rc.qualified];  // defined classes always carry a slot map
  }

  Resolver resolver{facts, files, {}};
  for (const auto& [qualified, entry] : facts.classes)
    resolver.by_package[{entry.package, entry.label}] = qualified;

  // parent resolution
  std::set<std::string> seen;
  for (const auto& rc : raw_classes) {
    if (!seen.insert(rc.qualified).second) continue;  // duplicate definition
    auto& entry = facts.classes.at(rc.qualified);
    const RawFile& file = files[rc.file_index];
    if (!rc.super_names.empty()) {
      const std::string q = resolver.resolve_type_name(rc.super_names[0], file);
      if (!q.empty()) entry.superclass = q;
    }
    for (const auto& raw : rc.iface_names) {
      const std::string q = resolver.resolve_type_name(raw, file);
      if (!q.empty() && std::find(entry.interfaces.begin(), entry.interfaces.end(), q) ==
                            entry.interfaces.end())
        entry.interfaces.push_back(q);
    }
  }

  check_type_acyclic(facts);

  // context counting
  seen.clear();
  for (const auto& rc : raw_classes) {
    if (!seen.insert(rc.qualified).second) continue;
    const RawFile& file = files[rc.file_index];
    for (const auto& method : rc.methods) {
      ++facts.contexts[rc.qualified]["API-" + method.name];
      for (const auto& param : method.params) {
        const std::string q = resolver.resolve_type_name(param.type, file);
        if (!q.empty() && resolver.defined(q)) ++facts.contexts[q]["ARG-" + method.name];
      }
      BodyScanner scanner(resolver, rc, file, method);
      scanner.scan(method.body);
    }
  }
  return facts;
}

CodeFacts parse_source_tree(const std::filesystem::path& root, std::ostream* diagnostics) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(root, ec) || ec)
    throw std::runtime_error("parse_source_tree: no such directory: " + root.string());

  std::vector<fs::path> paths;
  if (fs::is_regular_file(root)) {
    paths.push_back(root);
  } else {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".java")
        paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());

  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      if (diagnostics) *diagnostics << "warning: cannot read " << path.string() << "\n";
      continue;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    sources.emplace_back(path.string(), buffer.str());
  }
  return parse_java_sources(sources, diagnostics);
}

void check_type_acyclic(const CodeFacts& facts) {
  enum class Color { White, Gray, Black };
  std::map<std::string, Color> color;

  auto parents = [&](const std::string& q) {
    std::vector<std::string> out;
    const auto& e = facts.classes.at(q);
    if (e.superclass) out.push_back(*e.superclass);
    for (const auto& i : e.interfaces) out.push_back(i);
    return out;
  };

  for (const auto& [start, entry] : facts.classes) {
    if (color[start] != Color::White) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    color[start] = Color::Gray;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      const auto ps = parents(node);
      if (idx >= ps.size()) {
        color[node] = Color::Black;
        stack.pop_back();
        continue;
      }
      const std::string parent = ps[idx++];
      if (!facts.classes.count(parent)) continue;
      if (color[parent] == Color::Gray)
        throw std::runtime_error("type taxonomy cycle involving " + parent);
      if (color[parent] == Color::White) {
        color[parent] = Color::Gray;
        stack.emplace_back(parent, 0);
      }
    }
  }
}

std::set<std::string> ancestors_within(const CodeFacts& facts, const std::string& qualified,
                                       TaxonomyKind kind, int n) {
  auto it = facts.classes.find(qualified);
  if (it == facts.classes.end())
    throw std::invalid_argument("ancestors_within: unknown class: " + qualified);
  if (n < 1) throw std::invalid_argument("ancestors_within: n must be >= 1");

  std::set<std::string> out;
  if (kind == TaxonomyKind::Package) {
    std::string pkg = it->second.package;
    for (int level = 1; level <= n && !pkg.empty(); ++level) {
      out.insert(pkg);
      const auto pos = pkg.rfind('.');
      pkg = pos == std::string::npos ? std::string() : pkg.substr(0, pos);
    }
    return out;
  }

  std::set<std::string> frontier{qualified};
  for (int level = 1; level <= n && !frontier.empty(); ++level) {
    std::set<std::string> next;
    for (const auto& node : frontier) {
      auto ni = facts.classes.find(node);
      if (ni == facts.classes.end()) continue;
      if (ni->second.superclass) next.insert(*ni->second.superclass);
      for (const auto& iface : ni->second.interfaces) next.insert(iface);
    }
    frontier.clear();
    for (const auto& node : next)
      if (node != qualified && out.insert(node).second) frontier.insert(node);
  }
  return out;
}

std::string facts_to_json(const CodeFacts& facts, const std::string* config_echo) {
  nlohmann::json j;
  j["version"] = 1;
  if (config_echo) j["config"] = nlohmann::json::parse(*config_echo);

  nlohmann::json classes = nlohmann::json::array();
  for (const auto& [qualified, entry] : facts.classes) {
    nlohmann::json e;
    e["name"] = qualified;
    e["kind"] = entry.kind == ClassEntry::Kind::Interface ? "interface" : "class";
    if (entry.superclass)
      e["superclass"] = *entry.superclass;
    else
      e["superclass"] = nullptr;
    e["interfaces"] = entry.interfaces;
    e["external"] = entry.external;
    classes.push_back(std::move(e));
  }
  j["classes"] = std::move(classes);

  nlohmann::json contexts = nlohmann::json::object();
  for (const auto& [qualified, counts] : facts.contexts) {
    nlohmann::json inner = nlohmann::json::object();
    for (const auto& [context, count] : counts) inner[context] = count;
    contexts[qualified] = std::move(inner);
  }
  j["contexts"] = std::move(contexts);
  return j.dump(2) + "\n";
}

CodeFacts facts_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("facts: malformed JSON: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw std::runtime_error("facts: missing or unsupported \"version\" field");
  if (!j.contains("classes")) throw std::runtime_error("facts: missing \"classes\" field");

  CodeFacts facts;
  for (const auto& e : j["classes"]) {
    if (!e.contains("name")) throw std::runtime_error("facts: class entry without \"name\"");
    ClassEntry entry;
    entry.qualified_name = e["name"].get<std::string>();
    entry.label = label_of(entry.qualified_name);
    entry.package = package_of(entry.qualified_name);
    const std::string kind = e.value("kind", std::string("class"));
    if (kind != "class" && kind != "interface")
      throw std::runtime_error("facts: bad kind for " + entry.qualified_name);
    entry.kind = kind == "interface" ? ClassEntry::Kind::Interface : ClassEntry::Kind::Class;
    if (e.contains("superclass") && !e["superclass"].is_null())
      entry.superclass = e["superclass"].get<std::string>();
    if (e.contains("interfaces"))
      for (const auto& iface : e["interfaces"]) entry.interfaces.push_back(iface.get<std::string>());
    entry.external = e.value("external", false);
    facts.classes[entry.qualified_name] = std::move(entry);
  }

  if (j.contains("contexts")) {
    for (const auto& [qualified, counts] : j["contexts"].items()) {
      auto ci = facts.classes.find(qualified);
      if (ci == facts.classes.end())
        throw std::runtime_error("facts: contexts for unknown class " + qualified);
      if (ci->second.external)
        throw std::runtime_error("facts: contexts for external class " + qualified);
      auto& inner = facts.contexts[qualified];
      for (const auto& [context, count] : counts.items()) {
        const long long v = count.get<long long>();
        if (v < 1)
          throw std::runtime_error("facts: non-positive count for " + qualified + "/" + context);
        inner[context] = v;
      }
    }
  }
  for (const auto& [qualified, entry] : facts.classes)
    if (!entry.external) facts.contexts[qualified];
  check_type_acyclic(facts);
  return facts;
}

void save_facts(const CodeFacts& facts, const std::string& path,
                const std::string* config_echo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("facts: cannot open for writing: " + path);
  out << facts_to_json(facts, config_echo);
}

CodeFacts load_facts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("facts: cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return facts_from_json(buffer.str());
}

}  // namespace coordterm
