#include <gtest/gtest.h>

#include <string>

#include "minsing/errors.hpp"
#include "minsing/problem_file.hpp"

using namespace minsing;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_problem(text, "p.txt");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ProblemFile, ZariskiFile) {
  auto pf = parse_problem("# comment\nkind = zariski\n\nn = 16   # trailing\n", "z.txt");
  EXPECT_EQ(pf.kind(), ProblemKind::zariski);
  EXPECT_EQ(pf.integer(pf.require("n")), 16);
  EXPECT_EQ(pf.require("n").line, 4);
  EXPECT_EQ(pf.canonical_text(), "kind = zariski\nn = 16\n");
}

TEST(ProblemFile, RepeatedListKeys) {
  auto pf = parse_problem("kind = box\nrank = 1\ncone = 1\nl_restr = -4\nconormal = 8\nconormal = 8\n", "b");
  EXPECT_EQ(pf.all("conormal").size(), 2u);
  EXPECT_EQ(pf.rationals(*pf.all("conormal")[1]), (RationalVector{8}));
}

TEST(ProblemFile, RationalsAndReals) {
  auto pf = parse_problem("kind = integral\nr = 2\nt = 1/2   -1/3\nphi = 0.25 -1 3/4\n", "i");
  EXPECT_EQ(pf.rationals(pf.require("t")), (RationalVector{Rational(1, 2), Rational(-1, 3)}));
  EXPECT_EQ(pf.reals(pf.require("phi")), (std::vector<double>{0.25, -1.0, 0.75}));
  EXPECT_EQ(pf.require("t").value, "1/2 -1/3");
  EXPECT_THROW(pf.rationals(pf.require("phi")), InputError);
  EXPECT_THROW(pf.integer(pf.require("t")), InputError);
}

TEST(ProblemFile, UnknownKeyRejected) {
  auto msg = error_of("kind = box\nrank = 1\nl_restr = 1\nconormal = 1\nweight = 2\n");
  EXPECT_NE(msg.find("p.txt:5"), std::string::npos) << msg;
  EXPECT_NE(msg.find("unknown key 'weight'"), std::string::npos) << msg;
}

TEST(ProblemFile, StructuralErrors) {
  EXPECT_NE(error_of("").find("missing 'kind'"), std::string::npos);
  EXPECT_NE(error_of("n = 3\nkind = zariski\n").find("first key must be 'kind'"), std::string::npos);
  EXPECT_NE(error_of("kind = polytope\n").find("unknown kind"), std::string::npos);
  EXPECT_NE(error_of("kind = zariski\nn 16\n").find("p.txt:2"), std::string::npos);
  EXPECT_NE(error_of("kind = zariski\nn =\n").find("empty value"), std::string::npos);
  EXPECT_NE(error_of("kind = zariski\nn = 1\nn = 2\n").find("given twice"), std::string::npos);
  EXPECT_NE(error_of("kind = zariski\nkind = box\n").find("'kind' given twice"), std::string::npos);
  EXPECT_NE(error_of("kind = zariski\n").find("missing required key 'n'"), std::string::npos);
  EXPECT_NE(error_of("kind = integral\nr = 1\nt = 0\n").find("'phi'"), std::string::npos);
}

TEST(ProblemFile, ValueErrorsNameTheKey) {
  auto pf = parse_problem("kind = zariski\nn = 1/0\n", "z");
  try {
    pf.integer(pf.require("n"));
    FAIL();
  } catch (const InputError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("z:2"), std::string::npos);
    EXPECT_NE(msg.find("key 'n'"), std::string::npos);
  }
  auto pf2 = parse_problem("kind = integral\nr = 1\nt = abc\nphi = 0 0\nrel_tol = -1\n", "i");
  EXPECT_THROW(pf2.reals(pf2.require("t")), InputError);
  EXPECT_THROW(pf2.positive(pf2.require("rel_tol")), InputError);
}

TEST(ProblemFile, LoadFromDisk) {
  EXPECT_THROW(load_problem("/nonexistent/problem.txt"), InputError);
}

TEST(ProblemFile, HashIsStable) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
  auto a = parse_problem("kind = zariski\nn = 16\n", "a");
  auto b = parse_problem("# same content\nkind   =   zariski\n  n = 16  \n", "b");
  EXPECT_EQ(fnv1a(a.canonical_text()), fnv1a(b.canonical_text()));
}
