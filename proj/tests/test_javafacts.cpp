#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coordterm/javafacts.hpp"
#include "support/oracles.hpp"

using namespace coordterm;

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(COORDTERM_FIXTURE_DIR) + "/" + name;
}

std::vector<std::pair<std::string, std::string>> read_fixture_sources() {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(fixture_path("javasrc")))
    if (entry.is_regular_file() && entry.path().extension() == ".java")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& path : paths) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    sources.emplace_back(path.string(), buffer.str());
  }
  return sources;
}

}  // namespace

TEST_CASE("parse of a minimal declaration with unresolved parents") {
  const auto facts =
      parse_java_sources({{"A.java", "package p.q; class A extends B implements C {}"}});
  REQUIRE(facts.find("p.q.A") != nullptr);
  const ClassEntry& a = *facts.find("p.q.A");
  CHECK(a.label == "A");
  CHECK(a.package == "p.q");
  CHECK(a.kind == ClassEntry::Kind::Class);
  CHECK(a.superclass == "B");  // unresolved -> external stub under its bare name
  CHECK(a.interfaces == std::vector<std::string>{"C"});

  REQUIRE(facts.find("B") != nullptr);
  CHECK(facts.find("B")->external);
  CHECK(facts.find("C")->external);
  CHECK(facts.contexts.count("B") == 0);  // externals never get context slots
}

TEST_CASE("same-package parents resolve to qualified names") {
  const auto facts = parse_java_sources(
      {{"A.java", "package p.q; class A extends B {}"}, {"B.java", "package p.q; class B {}"}});
  CHECK(facts.find("p.q.A")->superclass == "p.q.B");
  CHECK_FALSE(facts.find("p.q.B")->external);
}

TEST_CASE("empty input yields empty facts") {
  const auto facts = parse_java_sources({});
  CHECK(facts.classes.empty());
  CHECK(facts.contexts.empty());
}

TEST_CASE("files that fail to parse are skipped with a diagnostic") {
  std::ostringstream diag;
  const auto facts = parse_java_sources(
      {{"Bad.java", "class {{{"}, {"Good.java", "package p; class Good {}"}}, &diag);
  CHECK(facts.find("p.Good") != nullptr);
  CHECK(diag.str().find("Bad.java") != std::string::npos);
}

TEST_CASE("nested classes use $ nesting and the enclosing package") {
  const auto facts = parse_java_sources(
      {{"Outer.java", "package p; class Outer { class Inner {} int f() { return 0; } }"}});
  REQUIRE(facts.find("p.Outer$Inner") != nullptr);
  CHECK(facts.find("p.Outer$Inner")->package == "p");
  CHECK(facts.find("p.Outer$Inner")->label == "Outer$Inner");
  CHECK(facts.contexts.at("p.Outer").at("API-f") == 1);
}

TEST_CASE("table 1 micro-examples") {
  // toString(i) with an Integer-declared i counts ARG-toString for Integer
  const char* src = R"(
    package t;
    import t2.Integer;
    class T {
      void go() {
        Integer i;
        String s = toString(i);
      }
    }
  )";
  const auto facts =
      parse_java_sources({{"T.java", src}, {"I.java", "package t2; class Integer {}"}});
  CHECK(facts.contexts.at("t2.Integer").at("ARG-toString") == 1);

  // map.size() with a HashMap-declared map counts API-size for HashMap
  const char* src2 = R"(
    package t;
    class HashMap { int size() { return 0; } }
    class U {
      void go() {
        HashMap map;
        int s = map.size();
      }
    }
  )";
  const auto facts2 = parse_java_sources({{"U.java", src2}});
  CHECK(facts2.contexts.at("t.HashMap").at("API-size") == 2);  // definition + invocation

  // two same-typed parameters count twice
  const auto facts3 = parse_java_sources(
      {{"F.java", "package t; class Foo { void f(Foo a, Foo b) {} }"}});
  CHECK(facts3.contexts.at("t.Foo").at("ARG-f") == 2);

  // literal arguments type as their boxed classes
  const char* src4 = R"(
    package t;
    import j.String;
    class G {
      void go() {
        f("s");
      }
    }
  )";
  const auto facts4 =
      parse_java_sources({{"G.java", src4}, {"S.java", "package j; class String {}"}});
  CHECK(facts4.contexts.at("j.String").at("ARG-f") == 1);

  // definition-only counting: three methods, never invoked
  const auto facts5 = parse_java_sources(
      {{"H.java", "package t; class H { void a() {} void b() {} int c() { return 1; } }"}});
  CHECK(facts5.contexts.at("t.H") ==
        ContextCounts{{"API-a", 1}, {"API-b", 1}, {"API-c", 1}});
}

TEST_CASE("unresolvable argument and receiver types are skipped") {
  const char* src = R"(
    package t;
    class T {
      void go() {
        f(unknownVar);
        unknown.m();
        g(h());
      }
      void f(T t) {}
    }
  )";
  const auto facts = parse_java_sources({{"T.java", src}});
  const auto& counts = facts.contexts.at("t.T");
  CHECK(counts.count("ARG-f") == 1);  // only the definition slot
  CHECK(counts.at("ARG-f") == 1);
  CHECK(counts.count("API-m") == 0);
  CHECK(counts.count("ARG-g") == 0);
  // no fabricated classes for unknown receivers
  CHECK(facts.find("unknown") == nullptr);
}

TEST_CASE("12-class fixture equals the hand-written golden file") {
  const auto parsed = parse_java_sources(read_fixture_sources());
  CHECK(parsed.classes.size() == 12);

  std::ifstream in(fixture_path("javasrc_golden_facts.json"));
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto golden = facts_from_json(buffer.str());

  CHECK(parsed.classes == golden.classes);
  CHECK(parsed.contexts == golden.contexts);
}

TEST_CASE("fixture context counts equal the independent re-scan oracle") {
  const auto sources = read_fixture_sources();
  const auto parsed = parse_java_sources(sources);
  const auto oracle = oracles::context_counts_rescan(sources);

  std::map<std::string, std::map<std::string, long long>> parsed_nonempty;
  for (const auto& [cls, counts] : parsed.contexts)
    if (!counts.empty()) parsed_nonempty[cls] = counts;
  CHECK(parsed_nonempty == oracle);
}

TEST_CASE("parse_source_tree walks directories and rejects missing roots") {
  const auto facts = parse_source_tree(fixture_path("javasrc"));
  CHECK(facts.classes.size() == 12);
  CHECK_THROWS(parse_source_tree(fixture_path("no_such_dir")));

  // empty directory -> empty facts
  const auto empty_dir =
      std::filesystem::temp_directory_path() / "coordterm_empty_src";
  std::filesystem::create_directories(empty_dir);
  const auto none = parse_source_tree(empty_dir);
  CHECK(none.classes.empty());
  std::filesystem::remove_all(empty_dir);
}

TEST_CASE("ancestors_within: package chain and type DAG") {
  const auto facts = parse_source_tree(fixture_path("javasrc"));

  const auto pkg2 = ancestors_within(facts, "java.util.ArrayList", TaxonomyKind::Package, 2);
  CHECK(pkg2 == std::set<std::string>{"java.util", "java"});
  CHECK(pkg2.size() == 2);

  const auto type1 = ancestors_within(facts, "java.util.ArrayList", TaxonomyKind::Type, 1);
  CHECK(type1 == std::set<std::string>{"java.util.AbstractList", "java.util.List",
                                       "java.util.RandomAccess", "java.lang.Cloneable",
                                       "java.io.Serializable"});
  CHECK(type1.size() == 5);

  // saturation: n past the taxonomy depth is idempotent
  const auto type6 = ancestors_within(facts, "java.util.ArrayList", TaxonomyKind::Type, 6);
  const auto type7 = ancestors_within(facts, "java.util.ArrayList", TaxonomyKind::Type, 7);
  CHECK(type6 == type7);

  // monotone growth in n, package prefix counting
  for (const auto& [qualified, entry] : facts.classes) {
    for (int n = 1; n < 6; ++n) {
      const auto smaller = ancestors_within(facts, qualified, TaxonomyKind::Type, n);
      const auto larger = ancestors_within(facts, qualified, TaxonomyKind::Type, n + 1);
      CHECK(std::includes(larger.begin(), larger.end(), smaller.begin(), smaller.end()));

      const auto pkg = ancestors_within(facts, qualified, TaxonomyKind::Package, n);
      long long segments = entry.package.empty()
                               ? 0
                               : 1 + std::count(entry.package.begin(), entry.package.end(), '.');
      CHECK(static_cast<long long>(pkg.size()) == std::min<long long>(n, segments));
    }
  }

  CHECK_THROWS(ancestors_within(facts, "no.such.Class", TaxonomyKind::Type, 1));
  CHECK_THROWS(ancestors_within(facts, "java.util.ArrayList", TaxonomyKind::Type, 0));
}

TEST_CASE("type taxonomy cycles are a hard error") {
  CHECK_THROWS_WITH_AS(
      parse_java_sources({{"A.java", "package p; class A extends B {}"},
                          {"B.java", "package p; class B extends A {}"}}),
      doctest::Contains("cycle"), std::runtime_error);
  CHECK_THROWS(parse_java_sources({{"A.java", "package p; class A extends A {}"}}));
}

TEST_CASE("facts serialization round-trips; malformed input errors") {
  const auto facts = parse_source_tree(fixture_path("javasrc"));
  const std::string json = facts_to_json(facts);
  const auto reloaded = facts_from_json(json);
  CHECK(reloaded == facts);
  CHECK(facts_to_json(reloaded) == json);

  CHECK_THROWS_WITH_AS(facts_from_json(R"({"version":1})"), doctest::Contains("classes"),
                       std::runtime_error);
  CHECK_THROWS(facts_from_json(R"({"classes":[]})"));  // missing version
  CHECK_THROWS(facts_from_json("not json"));
  CHECK_THROWS(facts_from_json(
      R"({"version":1,"classes":[{"name":"A"}],"contexts":{"A":{"API-x":0}}})"));
}

TEST_CASE("context counts survive a save/load cycle behind the same API") {
  const auto facts = parse_source_tree(fixture_path("javasrc"));
  const auto path = std::filesystem::temp_directory_path() / "coordterm_facts_rt.json";
  save_facts(facts, path.string());
  const auto loaded = load_facts(path.string());
  CHECK(loaded == facts);
  std::filesystem::remove(path);
}
