#include "hvt/feasibility.hpp"
#include "hvt/inequalities.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace hvt;

namespace {

MomentProblem three_valued_problem() {
    MomentProblem p;
    std::vector<Rational> s{-1, 0, 1};
    p.variables = {{"X", s}, {"Y", s}, {"Z", s}};
    for (const char* v : {"X", "Y", "Z"}) {
        p.constraints.push_back({{{v, 1}}, 0});
        p.constraints.push_back({{{v, 2}}, Rational(2, 3)});
    }
    p.constraints.push_back({{{"X", 1}, {"Y", 1}}, Rational(-1, 3)});
    p.constraints.push_back({{{"Y", 1}, {"Z", 1}}, Rational(-1, 3)});
    p.constraints.push_back({{{"X", 1}, {"Z", 1}}, Rational(-1, 3)});
    return p;
}

} // namespace

TEST(Decide, AllMinusHalfTripleIsInfeasible) {
    auto p = pm1_triple_problem(Rational(-1, 2), Rational(-1, 2), Rational(-1, 2));
    auto r = decide(p);
    ASSERT_FALSE(r.feasible());
    ASSERT_TRUE(r.certificate);
    EXPECT_TRUE(verify_certificate(p, *r.certificate));
    EXPECT_FALSE(r.witness);
}

TEST(Decide, ThreeValuedCounterexampleIsFeasible) {
    auto p = three_valued_problem();
    auto r = decide(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_TRUE(satisfies(p, *r.witness));
}

TEST(Decide, BellDirections) {
    EXPECT_FALSE(decide(pm1_triple_problem(Rational(-1, 2), Rational(-1, 2), Rational(-1, 2))).feasible());
    EXPECT_TRUE(decide(pm1_triple_problem(Rational(1, 2), Rational(-1, 2), Rational(-1, 2))).feasible());
}

TEST(Decide, EmptyConstraintSetIsFeasible) {
    MomentProblem p;
    p.variables = {pm1_variable("X")};
    auto r = decide(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.witness->masses().size(), 1u);
}

TEST(Decide, OutOfRangeTargetHasTwoTermCertificate) {
    MomentProblem p;
    p.variables = {pm1_variable("X")};
    p.constraints = {{{{"X", 1}}, Rational(3, 2)}};
    auto r = decide(p);
    ASSERT_FALSE(r.feasible());
    EXPECT_EQ(r.method, "range");
    EXPECT_TRUE(verify_certificate(p, *r.certificate));
}

TEST(Decide, InequalityRelations) {
    MomentProblem p;
    p.variables = {pm1_variable("X"), pm1_variable("Y")};
    p.constraints = {{{{"X", 1}, {"Y", 1}}, Rational(1, 2), Relation::at_least}, {{{"X", 1}}, 1, Relation::at_least}};
    auto r = decide(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_GE(expectation(*r.witness, {{"X", 1}, {"Y", 1}}), Rational(1, 2));
    EXPECT_EQ(mean(*r.witness, "X"), 1);

    p.constraints.push_back({{{"Y", 1}}, Rational(-1, 2), Relation::at_most});
    // X = 1 surely, so E(XY) = E(Y) <= -1/2 clashes with E(XY) >= 1/2
    auto q = decide(p);
    ASSERT_FALSE(q.feasible());
    EXPECT_TRUE(verify_certificate(p, *q.certificate));
}

TEST(Decide, ValidationErrors) {
    MomentProblem p;
    p.variables = {pm1_variable("X"), pm1_variable("X")};
    EXPECT_THROW(decide(p), ValidationError);

    MomentProblem q;
    q.variables = {pm1_variable("X")};
    q.constraints = {{{{"X", 1}}, 0}, {{{"X", 1}}, 0}};
    EXPECT_THROW(decide(q), ValidationError);
    q.constraints = {{{{"W", 1}}, 0}};
    EXPECT_THROW(decide(q), ValidationError);
    q.constraints = {{{{"X", 3}}, 0}};
    EXPECT_THROW(decide(q), ValidationError);
    q.higher_order = true;
    EXPECT_TRUE(decide(q).feasible());
}

TEST(Decide, AtomCap) {
    MomentProblem p;
    for (int i = 0; i < 10; ++i) p.variables.push_back(pm1_variable("V" + std::to_string(i)));
    EXPECT_THROW(decide(p, {512}), SizeError);
    EXPECT_NO_THROW(decide(p, {1024}));
    EXPECT_THROW(brute_force_oracle(p, 100), SizeError);
}

TEST(Certificate, RejectsBadVectors) {
    auto p = pm1_triple_problem(Rational(-1, 2), Rational(-1, 2), Rational(-1, 2));
    std::vector<Rational> zero(p.constraints.size() + 1, Rational(0));
    EXPECT_FALSE(verify_certificate(p, zero));
    EXPECT_THROW(verify_certificate(p, std::vector<Rational>(3, Rational(0))), ValidationError);

    auto cert = *decide(p).certificate;
    auto feasible = pm1_triple_problem(0, 0, 0);
    EXPECT_FALSE(verify_certificate(feasible, cert));
    // scaling by a positive factor keeps it valid; negating does not
    for (auto& c : cert) c *= 3;
    EXPECT_TRUE(verify_certificate(p, cert));
    for (auto& c : cert) c = -c;
    EXPECT_FALSE(verify_certificate(p, cert));
}

TEST(Oracle, AgreesOnSpecExamples) {
    for (const auto& p : {pm1_triple_problem(Rational(-1, 2), Rational(-1, 2), Rational(-1, 2)), three_valued_problem(),
                          pm1_triple_problem(Rational(1, 2), Rational(-1, 2), Rational(-1, 2))})
        EXPECT_EQ(decide(p).verdict, brute_force_oracle(p).verdict) << p.label;
}

TEST(Oracle, AgreesOnRandomProblems) {
    prop::Gen g(31);
    int infeasible = 0;
    for (int i = 0; i < 300; ++i) {
        auto p = g.problem();
        auto a = decide(p);
        auto b = brute_force_oracle(p);
        ASSERT_EQ(a.verdict, b.verdict) << "sample " << i;
        if (b.feasible()) EXPECT_TRUE(satisfies(p, *b.witness));
        else {
            ++infeasible;
            EXPECT_TRUE(verify_certificate(p, *b.certificate));
        }
    }
    EXPECT_GT(infeasible, 30);
    EXPECT_LT(infeasible, 270);
}

TEST(Decide, FeasibleWhenTargetsComeFromADistribution) {
    prop::Gen g(32);
    for (int i = 0; i < 200; ++i) {
        auto vars = g.variables();
        auto d = g.distribution(vars);
        MomentProblem p;
        p.variables = vars;
        std::set<Monomial> seen;
        for (int k = 0; k < 4; ++k) {
            auto m = g.monomial(vars);
            if (seen.insert(m).second) p.constraints.push_back({m, expectation(d, m)});
        }
        auto r = decide(p);
        ASSERT_TRUE(r.feasible());
        EXPECT_TRUE(satisfies(p, *r.witness));
    }
}

// Removing a constraint can only enlarge the feasible set.
TEST(Decide, MonotoneUnderConstraintRemoval) {
    prop::Gen g(33);
    int checked = 0;
    for (int i = 0; i < 150; ++i) {
        auto p = g.problem();
        if (p.constraints.empty()) continue;
        bool f = decide(p).feasible();
        for (std::size_t k = 0; k < p.constraints.size(); ++k) {
            auto q = p;
            q.constraints.erase(q.constraints.begin() + static_cast<long>(k));
            bool fq = decide(q).feasible();
            if (f) EXPECT_TRUE(fq);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

// Relaxing an equality to >= or <= never turns feasible into infeasible.
TEST(Decide, RelaxationPreservesFeasibility) {
    prop::Gen g(34);
    for (int i = 0; i < 150; ++i) {
        auto p = g.problem();
        if (p.constraints.empty()) continue;
        bool f = decide(p).feasible();
        for (auto rel : {Relation::at_least, Relation::at_most}) {
            auto q = p;
            for (auto& c : q.constraints)
                if (c.relation == Relation::equal) c.relation = rel;
            if (f) EXPECT_TRUE(decide(q).feasible());
        }
    }
}

TEST(Reduction, SpinOneInfeasibleThroughSignMap) {
    // spin-1 observables; with E(A^2) = E(B^2) = 1 the map (-1,+1,+1) agrees
    // with the identity on the occupied values, so a CHSH violation carries over
    std::vector<Rational> s{-1, 0, 1};
    MomentProblem p;
    p.variables = {{"A", s}, {"Ap", s}, {"B", s}, {"Bp", s}};
    auto pair = [](const char* x, const char* y, unsigned ex, unsigned ey) { return Monomial{{x, ex}, {y, ey}}; };
    std::vector<std::pair<std::string, std::string>> cross{{"A", "B"}, {"A", "Bp"}, {"Ap", "B"}, {"Ap", "Bp"}};
    std::vector<Rational> e{1, 1, 1, -1};
    for (const char* v : {"A", "Ap", "B", "Bp"}) {
        p.constraints.push_back({{{v, 1}}, 0});
        p.constraints.push_back({{{v, 2}}, 1});
    }
    for (std::size_t k = 0; k < 4; ++k) {
        auto [x, y] = cross[k];
        p.constraints.push_back({pair(x.c_str(), y.c_str(), 1, 1), e[k]});
        p.constraints.push_back({pair(x.c_str(), y.c_str(), 2, 1), 0});
        p.constraints.push_back({pair(x.c_str(), y.c_str(), 1, 2), 0});
        p.constraints.push_back({pair(x.c_str(), y.c_str(), 2, 2), 1});
    }
    std::vector<SignMap> maps;
    for (const char* v : {"A", "Ap", "B", "Bp"}) maps.push_back({v, {-1, 1, 1}});
    auto r = reduce_then_test(p, maps);
    EXPECT_EQ(r.verdict, ReductionVerdict::original_infeasible) << r.detail;
    ASSERT_TRUE(r.mapped);
    EXPECT_FALSE(decide(p).feasible());

    // drop E(A^2 B^2): the mapped E(f(A) f(B)) is no longer determined
    auto q = p;
    std::erase_if(q.constraints, [](const MomentConstraint& c) { return c.exponents == Monomial{{"A", 2}, {"B", 2}}; });
    auto u = reduce_then_test(q, maps);
    EXPECT_EQ(u.verdict, ReductionVerdict::underdetermined);
    EXPECT_NE(u.detail.find("E(A^2 B^2)"), std::string::npos) << u.detail;
}

TEST(Reduction, IdentityMapOnPm1MatchesDecide) {
    for (auto [a, b, c] : {std::tuple{Rational(-1, 2), Rational(-1, 2), Rational(-1, 2)},
                           std::tuple{Rational(1, 2), Rational(-1, 2), Rational(-1, 2)}}) {
        auto p = pm1_triple_problem(a, b, c);
        std::vector<SignMap> id{{"X", {-1, 1}}, {"Y", {-1, 1}}, {"Z", {-1, 1}}};
        auto r = reduce_then_test(p, id);
        if (decide(p).feasible()) EXPECT_EQ(r.verdict, ReductionVerdict::inconclusive);
        else EXPECT_EQ(r.verdict, ReductionVerdict::original_infeasible);
    }
}

TEST(Reduction, Errors) {
    auto p = pm1_triple_problem(0, 0, 0);
    std::vector<SignMap> partial{{"X", {-1, 1}}};
    EXPECT_THROW(reduce_then_test(p, partial), ValidationError);
    std::vector<SignMap> unknown{{"W", {-1, 1}}, {"X", {-1, 1}}, {"Y", {-1, 1}}, {"Z", {-1, 1}}};
    EXPECT_THROW(reduce_then_test(p, unknown), ConstraintMismatch);
    std::vector<SignMap> bad{{"X", {-1, 2}}, {"Y", {-1, 1}}, {"Z", {-1, 1}}};
    EXPECT_THROW(reduce_then_test(p, bad), ValidationError);
    std::vector<SignMap> short_map{{"X", {-1}}, {"Y", {-1, 1}}, {"Z", {-1, 1}}};
    EXPECT_THROW(reduce_then_test(p, short_map), ValidationError);
}
