#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>

#include "qpmc/interval.hpp"
#include "qpmc/logic.hpp"
#include "qpmc/model.hpp"

namespace qpmc {

enum class Truth { Holds, Fails, Unknown };

inline const char* truth_name(Truth t) {
    switch (t) {
        case Truth::Holds: return "HOLDS";
        case Truth::Fails: return "FAILS";
        case Truth::Unknown: return "UNKNOWN";
    }
    return "?";
}

struct Verdict {
    Truth truth = Truth::Unknown;
    std::optional<ProbInterval> interval;  // present when the formula root is a Prob node
    bool quiescent = true;                 // every explored run resolved within the horizon
    unsigned long horizon = 0;             // horizon the verdict was produced at
};

struct CheckOptions {
    bool memoize = true;
    std::size_t memo_cap = 0;            // 0 = unbounded
    unsigned long max_horizon = 10000;   // ceiling for iterative deepening
};

// Exact three-valued PCTL/bPCTL evaluation over a ModelAdapter.
//
// All probability arithmetic is rational (squared moduli only). Evaluation carries a
// step budget; nodes that would need to look past it contribute [0, mass] uncertainty,
// so bounded-only formulas at horizon >= required_horizon always produce point values.
// Absorbing states resolve pending untils definitively: their labels never change.
class Checker {
public:
    explicit Checker(ModelAdapter& model, CheckOptions options = {})
        : model_(model), options_(options) {}

    Verdict check_state(StateId state, const StateFormulaPtr& f, unsigned long horizon) {
        validate_atoms(*f);
        auto [truth, quiescent] = eval_state(f, state, horizon);
        Verdict v;
        v.truth = truth;
        v.quiescent = quiescent;
        v.horizon = horizon;
        if (f->kind == StateFormula::Kind::Prob) {
            auto pv = eval_path(f->path, state, horizon);
            v.interval = ProbInterval{pv.lo, pv.hi};
        }
        return v;
    }

    std::pair<ProbInterval, bool> prob_path(StateId state, const PathFormulaPtr& f,
                                            unsigned long horizon) {
        if (f->lhs) validate_atoms(*f->lhs);
        if (f->rhs) validate_atoms(*f->rhs);
        auto pv = eval_path(f, state, horizon);
        return {ProbInterval{pv.lo, pv.hi}, pv.quiescent};
    }

    /// Doubles the horizon until the verdict resolves or the ceiling is hit; bounded-only
    /// formulas are checked once at their required horizon.
    Verdict check_quiescent(StateId state, const StateFormulaPtr& f) {
        const auto req = required_horizon(*f);
        if (req) {
            const unsigned long h = std::max<unsigned long>(*req, 1);
            return check_state(state, f, std::min(h, options_.max_horizon));
        }
        Verdict last;
        unsigned long h = 16;
        while (true) {
            if (h > options_.max_horizon) h = options_.max_horizon;
            last = check_state(state, f, h);
            if (last.truth != Truth::Unknown) return last;
            if (h >= options_.max_horizon) return last;
            h *= 2;
        }
    }

private:
    struct PathValue {
        Rational lo;
        Rational hi;
        bool quiescent;
    };

    static constexpr unsigned long kInf = std::numeric_limits<unsigned long>::max();

    ModelAdapter& model_;
    CheckOptions options_;

    struct KeyHash {
        std::size_t operator()(const std::tuple<const void*, StateId, unsigned long,
                                                unsigned long>& k) const {
            std::uint64_t h = 1469598103934665603ull;
            auto mix = [&h](std::uint64_t v) {
                h ^= v;
                h *= 1099511628211ull;
            };
            mix(reinterpret_cast<std::uintptr_t>(std::get<0>(k)));
            mix(std::get<1>(k));
            mix(std::get<2>(k));
            mix(std::get<3>(k));
            return static_cast<std::size_t>(h);
        }
    };
    using StateKey = std::tuple<const void*, StateId, unsigned long, unsigned long>;
    std::unordered_map<StateKey, std::pair<Truth, bool>, KeyHash> state_memo_;
    std::unordered_map<StateKey, PathValue, KeyHash> path_memo_;
    std::unordered_map<const void*, std::optional<unsigned long>> horizon_cache_;
    std::unordered_map<const void*, bool> atoms_checked_;

    void validate_atoms(const StateFormula& f) {
        if (atoms_checked_.count(&f)) return;
        switch (f.kind) {
            case StateFormula::Kind::True:
                break;
            case StateFormula::Kind::Atom:
                if (!model_.known_atom(f.atom))
                    throw input_error("unknown atomic proposition '" + f.atom + "'");
                break;
            case StateFormula::Kind::Not:
                validate_atoms(*f.lhs);
                break;
            case StateFormula::Kind::And:
                validate_atoms(*f.lhs);
                validate_atoms(*f.rhs);
                break;
            case StateFormula::Kind::Prob:
                if (f.path->lhs) validate_atoms(*f.path->lhs);
                if (f.path->rhs) validate_atoms(*f.path->rhs);
                break;
        }
        atoms_checked_[&f] = true;
    }

    std::optional<unsigned long> horizon_of(const StateFormula& f) {
        auto it = horizon_cache_.find(&f);
        if (it != horizon_cache_.end()) return it->second;
        auto h = required_horizon(f);
        horizon_cache_[&f] = h;
        return h;
    }

    // Budgets at or above a node's required horizon all produce the same result; they
    // share one memo slot.
    unsigned long canonical_budget(const StateFormula& f, unsigned long budget) {
        auto req = horizon_of(f);
        if (req && budget >= *req) return kInf;
        return budget;
    }

    std::pair<Truth, bool> eval_state(const StateFormulaPtr& f, StateId state,
                                      unsigned long budget) {
        switch (f->kind) {
            case StateFormula::Kind::True:
                return {Truth::Holds, true};
            case StateFormula::Kind::Atom:
                return {model_.has_label(state, f->atom) ? Truth::Holds : Truth::Fails, true};
            default:
                break;
        }
        const StateKey key{f.get(), state, canonical_budget(*f, budget), 0};
        if (options_.memoize) {
            auto it = state_memo_.find(key);
            if (it != state_memo_.end()) return it->second;
        }
        std::pair<Truth, bool> result{Truth::Unknown, false};
        switch (f->kind) {
            case StateFormula::Kind::Not: {
                auto [t, q] = eval_state(f->lhs, state, budget);
                if (t == Truth::Holds) result = {Truth::Fails, q};
                else if (t == Truth::Fails) result = {Truth::Holds, q};
                else result = {Truth::Unknown, q};
                break;
            }
            case StateFormula::Kind::And: {
                auto [lt, lq] = eval_state(f->lhs, state, budget);
                if (lt == Truth::Fails) {
                    result = {Truth::Fails, lq};
                    break;
                }
                auto [rt, rq] = eval_state(f->rhs, state, budget);
                if (rt == Truth::Fails) result = {Truth::Fails, rq};
                else if (lt == Truth::Holds && rt == Truth::Holds) result = {Truth::Holds, lq && rq};
                else result = {Truth::Unknown, lq && rq};
                break;
            }
            case StateFormula::Kind::Prob: {
                const PathValue pv = eval_path(f->path, state, budget);
                Truth t;
                if (f->cmp == Cmp::Greater) {
                    if (pv.lo > f->bound) t = Truth::Holds;
                    else if (pv.hi <= f->bound) t = Truth::Fails;
                    else t = Truth::Unknown;
                } else {
                    if (pv.lo == pv.hi && pv.lo == f->bound) t = Truth::Holds;
                    else if (f->bound < pv.lo || f->bound > pv.hi) t = Truth::Fails;
                    else t = Truth::Unknown;
                }
                result = {t, pv.quiescent};
                break;
            }
            default:
                break;
        }
        memo_put(state_memo_, key, result);
        return result;
    }

    template <typename Map, typename K, typename V>
    void memo_put(Map& map, const K& key, const V& value) {
        if (!options_.memoize) return;
        if (options_.memo_cap != 0 && map.size() >= options_.memo_cap) return;
        map.emplace(key, value);
    }

    PathValue eval_path(const PathFormulaPtr& f, StateId state, unsigned long budget) {
        if (f->kind == PathFormula::Kind::Next) return eval_next(f, state, budget);
        const unsigned long j0 =
            f->kind == PathFormula::Kind::BoundedUntil ? f->steps : kInf;
        return eval_until(f, state, j0, budget);
    }

    PathValue eval_next(const PathFormulaPtr& f, StateId state, unsigned long budget) {
        auto req_inner = horizon_of(*f->lhs);
        const unsigned long canon =
            (req_inner && budget >= 1 + *req_inner) ? kInf : budget;
        const StateKey key{f.get(), state, canon, 0};
        if (options_.memoize) {
            auto it = path_memo_.find(key);
            if (it != path_memo_.end()) return it->second;
        }
        PathValue out{Rational(0), Rational(0), true};
        if (budget < 1) {
            out = {Rational(0), Rational(1), false};
        } else {
            for (const Transition& tr : model_.transitions(state)) {
                auto [t, q] = eval_state(f->lhs, tr.target, budget - 1);
                (void)q;
                if (t == Truth::Holds) {
                    out.lo += tr.amp.mod2;
                    out.hi += tr.amp.mod2;
                } else if (t == Truth::Unknown) {
                    out.hi += tr.amp.mod2;
                    out.quiescent = false;
                }
            }
        }
        memo_put(path_memo_, key, out);
        return out;
    }

    // Until recursion: v(c, 0) = [rhs at c]; v(c, j) = 1 if rhs holds, 0 if lhs fails,
    // else the successor-weighted sum one step deeper. The budget truncates exploration;
    // truncated mass contributes [0, 1] and clears the quiescent flag. Absorbing states
    // resolve definitively since their labels never change.
    PathValue eval_until(const PathFormulaPtr& f, StateId state, unsigned long j,
                         unsigned long budget) {
        unsigned long canon = budget;
        {
            auto lh = horizon_of(*f->lhs);
            auto rh = horizon_of(*f->rhs);
            if (lh && rh && j != kInf) {
                const unsigned long need = j + std::max(*lh, *rh);
                if (budget >= need) canon = kInf;
            }
        }
        const StateKey key{f.get(), state, j, canon};
        if (options_.memoize) {
            auto it = path_memo_.find(key);
            if (it != path_memo_.end()) return it->second;
        }

        PathValue out{Rational(0), Rational(0), true};
        auto [rhs_t, rhs_q] = eval_state(f->rhs, state, budget);
        if (rhs_t == Truth::Holds) {
            out = {Rational(1), Rational(1), true};
            memo_put(path_memo_, key, out);
            return out;
        }
        auto [lhs_t, lhs_q] = eval_state(f->lhs, state, budget);

        if (rhs_t == Truth::Unknown) {
            // Possibly satisfied right here; definite satisfaction can still come later.
            PathValue cont{Rational(0), Rational(0), false};
            if (lhs_t == Truth::Holds && j > 0 && budget > 0 && !model_.is_absorbing(state))
                cont = recurse_until(f, state, j, budget);
            out = {cont.lo, Rational(1), false};
        } else if (lhs_t == Truth::Fails) {
            out = {Rational(0), Rational(0), rhs_q && lhs_q};
        } else if (model_.is_absorbing(state)) {
            // rhs fails now and forever on the self-loop.
            out = {Rational(0), Rational(0), rhs_q && lhs_q};
        } else if (j == 0) {
            out = {Rational(0), Rational(0), rhs_q && lhs_q};  // step bound exhausted
        } else if (budget == 0) {
            out = {Rational(0), Rational(1), false};  // exploration budget exhausted
        } else {
            PathValue sum = recurse_until(f, state, j, budget);
            if (lhs_t == Truth::Unknown) {
                out = {Rational(0), sum.hi, false};
            } else {
                out = sum;
                out.quiescent = sum.quiescent && rhs_q && lhs_q;
            }
        }
        memo_put(path_memo_, key, out);
        return out;
    }

    PathValue recurse_until(const PathFormulaPtr& f, StateId state, unsigned long j,
                            unsigned long budget) {
        PathValue sum{Rational(0), Rational(0), true};
        for (const Transition& tr : model_.transitions(state)) {
            const PathValue v =
                eval_until(f, tr.target, j == kInf ? kInf : j - 1, budget - 1);
            sum.lo += tr.amp.mod2 * v.lo;
            sum.hi += tr.amp.mod2 * v.hi;
            sum.quiescent = sum.quiescent && v.quiescent;
        }
        return sum;
    }
};

// Free-function faces matching the operation names used throughout the docs and tests.

inline std::pair<ProbInterval, bool> prob_path(ModelAdapter& model, StateId state,
                                               const PathFormulaPtr& f, unsigned long horizon,
                                               CheckOptions options = {}) {
    Checker checker(model, options);
    return checker.prob_path(state, f, horizon);
}

inline Verdict check_state(ModelAdapter& model, StateId state, const StateFormulaPtr& f,
                           unsigned long horizon, CheckOptions options = {}) {
    Checker checker(model, options);
    return checker.check_state(state, f, horizon);
}

inline Verdict check_quiescent(ModelAdapter& model, StateId state, const StateFormulaPtr& f,
                               CheckOptions options = {}) {
    Checker checker(model, options);
    return checker.check_quiescent(state, f);
}

}  // namespace qpmc
