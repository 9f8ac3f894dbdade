#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qpmc/qmc.hpp"
#include "qpmc/qpds.hpp"

namespace qpmc {

using StateId = std::uint32_t;

struct Transition {
    StateId target;
    Amplitude amp;
};

// Uniform successor-generator view of a model: a finite chain given explicitly, or the
// infinite chain induced by a pushdown system, unrolled lazily behind dense state ids.
// Implementations cache rows; spans stay valid for the adapter's lifetime.
class ModelAdapter {
public:
    virtual ~ModelAdapter() = default;

    virtual std::span<const Transition> transitions(StateId state) = 0;
    virtual std::span<const std::string> labels(StateId state) = 0;

    /// False only when the model can enumerate its proposition universe and `ap` is
    /// not in it; identity-labeled pushdown systems accept every atom.
    virtual bool known_atom(std::string_view ap) = 0;

    bool has_label(StateId state, std::string_view ap) {
        for (const auto& l : labels(state))
            if (l == ap) return true;
        return false;
    }

    /// Absorbing state: exactly one self-loop of probability 1.
    bool is_absorbing(StateId state) {
        const auto row = transitions(state);
        return row.size() == 1 && row[0].target == state && row[0].amp.mod2 == 1;
    }
};

class FiniteChainModel final : public ModelAdapter {
public:
    /// `universe` extends the proposition universe beyond the labels that occur;
    /// atoms outside the universe are rejected as input errors.
    FiniteChainModel(FiniteQmc chain, std::vector<std::vector<std::string>> state_labels,
                     std::vector<std::string> universe = {})
        : chain_(std::move(chain)), labels_(std::move(state_labels)) {
        for (auto& ap : universe) universe_[std::move(ap)] = true;
        if (labels_.size() != chain_.state_count())
            throw input_error("label vector size does not match state count");
        rows_.resize(chain_.state_count());
        for (std::size_t i = 0; i < chain_.state_count(); ++i) {
            for (const auto& [target, amp] : chain_.transitions[i])
                rows_[i].push_back({static_cast<StateId>(target), amp});
        }
        for (const auto& ls : labels_)
            for (const auto& l : ls) universe_[l] = true;
    }

    std::span<const Transition> transitions(StateId s) override { return rows_.at(s); }
    std::span<const std::string> labels(StateId s) override { return labels_.at(s); }
    bool known_atom(std::string_view ap) override {
        return universe_.count(std::string(ap)) > 0;
    }

    const FiniteQmc& chain() const { return chain_; }

private:
    FiniteQmc chain_;
    std::vector<std::vector<std::string>> labels_;
    std::vector<std::vector<Transition>> rows_;
    std::unordered_map<std::string, bool> universe_;
};

class PushdownModel final : public ModelAdapter {
public:
    explicit PushdownModel(const PushdownSystem& sys) : sys_(sys) {
        // Per-(control, symbol) rule index; rule order is preserved.
        rule_index_.resize(sys.control_count() * sys.symbols.size());
        for (std::uint32_t r = 0; r < sys.rules.size(); ++r) {
            const Rule& rule = sys.rules[r];
            rule_index_[rule.lhs_state * sys.symbols.size() + rule.lhs_symbol].push_back(r);
        }
    }

    StateId intern(const Configuration& c) {
        auto it = ids_.find(c);
        if (it != ids_.end()) return it->second;
        const StateId id = static_cast<StateId>(configs_.size());
        configs_.push_back(c);
        ids_.emplace(configs_.back(), id);
        rows_.emplace_back();
        rows_ready_.push_back(false);
        labels_.emplace_back();
        labels_ready_.push_back(false);
        return id;
    }

    const Configuration& config(StateId s) const { return configs_.at(s); }

    std::span<const Transition> transitions(StateId s) override {
        if (!rows_ready_.at(s)) {
            const Configuration c = configs_[s];  // copy: intern() may grow the arena
            std::vector<Transition> row;
            if (c.stack.empty()) {
                row.push_back({s, Amplitude::identity()});
            } else {
                const SymbolId top = c.stack.front();
                for (std::uint32_t ri : rule_index_.at(c.control * sys_.symbols.size() + top)) {
                    const Rule& r = sys_.rules[ri];
                    Configuration next;
                    next.control = r.rhs_state;
                    next.stack.reserve(r.rhs.size() + c.stack.size() - 1);
                    next.stack.insert(next.stack.end(), r.rhs.begin(), r.rhs.end());
                    next.stack.insert(next.stack.end(), c.stack.begin() + 1, c.stack.end());
                    row.push_back({intern(next), r.amp});
                }
            }
            rows_[s] = std::move(row);
            rows_ready_[s] = true;
        }
        return rows_[s];
    }

    std::span<const std::string> labels(StateId s) override {
        if (!labels_ready_.at(s)) {
            labels_[s] = labels_of(sys_, configs_[s]);
            labels_ready_[s] = true;
        }
        return labels_[s];
    }

    bool known_atom(std::string_view ap) override {
        if (sys_.assignment.empty()) return true;  // identity labeling: open universe
        if (sys_.assignment.sets.count(std::string(ap))) return true;
        if (ap == kEmptyLabel) return true;
        // Identity still covers heads no explicit set mentions.
        if (sys_.find_symbol(ap)) return true;
        if (!sys_.stateless()) {
            if (sys_.find_control(ap)) return true;
            const auto dot = ap.find('.');
            if (dot != std::string_view::npos && sys_.find_control(ap.substr(0, dot)) &&
                sys_.find_symbol(ap.substr(dot + 1)))
                return true;
        }
        return false;
    }

    const PushdownSystem& system() const { return sys_; }

private:
    const PushdownSystem& sys_;
    std::deque<Configuration> configs_;
    std::unordered_map<Configuration, StateId, ConfigurationHash> ids_;
    std::deque<std::vector<Transition>> rows_;
    std::deque<bool> rows_ready_;
    std::deque<std::vector<std::string>> labels_;
    std::deque<bool> labels_ready_;
    std::vector<std::vector<std::uint32_t>> rule_index_;
};

}  // namespace qpmc
