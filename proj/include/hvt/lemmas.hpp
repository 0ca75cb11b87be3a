#pragma once

// Executable forms of five elementary facts about probability-one
// conditional statements. Each check first evaluates the positivity and
// probability-one hypotheses on a concrete distribution; when they hold it
// evaluates the conclusion exactly and, on failure, returns the positive-mass
// atoms that break it.

#include "hvt/probability.hpp"

#include <string>

namespace hvt {

enum class LemmaOutcome { holds, vacuous, violated };

inline const char* to_string(LemmaOutcome o) {
    switch (o) {
        case LemmaOutcome::holds: return "holds";
        case LemmaOutcome::vacuous: return "vacuous";
        case LemmaOutcome::violated: return "violated";
    }
    return "?";
}

struct LemmaReport {
    LemmaOutcome outcome = LemmaOutcome::vacuous;
    std::string detail;       // failed hypothesis, or the conclusion checked
    std::set<Atom> violating; // positive-mass atoms contradicting the conclusion
};

/// Arguments for the five lemmas. Which fields a lemma reads:
///   1: a, b, c            P(A|B)=1, P(BC)>0            => P(A|BC)=1
///   2: a, x, y, c_value   P(A)>0, P(X=c|A)=P(Y=c|A)=1  => P(X=Y|A)=1
///   3: a, x, y, c_value   P(A,X=c)>0, P(X=Y|A,X=c)=1   => P(Y=c|A,X=c)=1
///   4: a, b, c            P(B),P(C)>0, P(A|B)=P(B|C)=1 => P(A|C)=1
///   5: a, x, y, z, c_value, d_value
///      P(A,Y=d),P(A,Z=d)>0, P(X=c|A,Y=d)=1, P(Z=Y|A,Z=d)=1 => P(X=c|A,Z=d)=1
struct LemmaArgs {
    Event a, b, c;
    std::string x, y, z;
    Rational c_value = 0, d_value = 0;
};

namespace detail {

inline bool certain(const JointDistribution& dist, const Event& target, const Event& given) {
    auto p = conditional(dist, target, given);
    return p && *p == 1;
}

inline LemmaReport conclude(const JointDistribution& dist, const Event& target, const Event& given,
                            std::string description) {
    LemmaReport r;
    r.detail = std::move(description);
    if (certain(dist, target, given)) {
        r.outcome = LemmaOutcome::holds;
        return r;
    }
    r.outcome = LemmaOutcome::violated;
    for (const auto& [atom, p] : dist.masses())
        if (given.contains(atom) && !target.contains(atom)) r.violating.insert(atom);
    return r;
}

inline LemmaReport vacuous(std::string why) { return {LemmaOutcome::vacuous, std::move(why), {}}; }

} // namespace detail

inline LemmaReport prob1_lemma_check(const JointDistribution& dist, int lemma, const LemmaArgs& args) {
    using detail::certain;
    using detail::conclude;
    using detail::vacuous;
    switch (lemma) {
        case 1: {
            if (!certain(dist, args.a, args.b)) return vacuous("P(A|B) = 1 fails");
            Event bc = args.b & args.c;
            if (probability(dist, bc) == 0) return vacuous("P(BC) > 0 fails");
            return conclude(dist, args.a, bc, "P(A|BC) = 1");
        }
        case 2: {
            if (probability(dist, args.a) == 0) return vacuous("P(A) > 0 fails");
            if (!certain(dist, value_event(dist, args.x, args.c_value), args.a)) return vacuous("P(X=c|A) = 1 fails");
            if (!certain(dist, value_event(dist, args.y, args.c_value), args.a)) return vacuous("P(Y=c|A) = 1 fails");
            return conclude(dist, equal_event(dist, args.x, args.y), args.a, "P(X=Y|A) = 1");
        }
        case 3: {
            Event given = args.a & value_event(dist, args.x, args.c_value);
            if (probability(dist, given) == 0) return vacuous("P(A, X=c) > 0 fails");
            if (!certain(dist, equal_event(dist, args.x, args.y), given)) return vacuous("P(X=Y|A,X=c) = 1 fails");
            return conclude(dist, value_event(dist, args.y, args.c_value), given, "P(Y=c|A,X=c) = 1");
        }
        case 4: {
            if (probability(dist, args.b) == 0) return vacuous("P(B) > 0 fails");
            if (probability(dist, args.c) == 0) return vacuous("P(C) > 0 fails");
            if (!certain(dist, args.a, args.b)) return vacuous("P(A|B) = 1 fails");
            if (!certain(dist, args.b, args.c)) return vacuous("P(B|C) = 1 fails");
            return conclude(dist, args.a, args.c, "P(A|C) = 1");
        }
        case 5: {
            Event ay = args.a & value_event(dist, args.y, args.d_value);
            Event az = args.a & value_event(dist, args.z, args.d_value);
            if (probability(dist, ay) == 0) return vacuous("P(A, Y=d) > 0 fails");
            if (probability(dist, az) == 0) return vacuous("P(A, Z=d) > 0 fails");
            if (!certain(dist, value_event(dist, args.x, args.c_value), ay)) return vacuous("P(X=c|A,Y=d) = 1 fails");
            if (!certain(dist, equal_event(dist, args.z, args.y), az)) return vacuous("P(Z=Y|A,Z=d) = 1 fails");
            return conclude(dist, value_event(dist, args.x, args.c_value), az, "P(X=c|A,Z=d) = 1");
        }
        default: throw ValidationError("lemma id must be 1..5, got " + std::to_string(lemma));
    }
}

} // namespace hvt
