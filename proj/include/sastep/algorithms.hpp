#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sastep/iterate_table.hpp"
#include "sastep/random.hpp"
#include "sastep/stepsize.hpp"

namespace sastep {

enum class Algorithm { rl, saga, pass, pass_vec };

enum class Branch { first_visit, increase, decrease, none };

struct StepReport {
    StateIndex state = 0;
    double rate_used = 0.0;
    double residual = 0.0;
    Branch branch = Branch::none;
};

// M stored residuals per state, slot chosen uniformly at each step. Each slot
// also keeps the iterate value it was written with (its anchor).
class SagaMemory {
public:
    SagaMemory(std::size_t n_states, int depth, double initial = 0.0, double initial_anchor = 0.0);

    int depth() const { return depth_; }
    double slot(StateIndex z, int j) const;
    double anchor(StateIndex z, int j) const;
    void set_slot(StateIndex z, int j, double value, double anchor = 0.0);
    double mean(StateIndex z) const;
    std::span<const double> slots(StateIndex z) const;

private:
    int depth_;
    std::vector<double> slots_;
    std::vector<double> anchors_;
};

// Inner-level PASS state: adapted rate and last residual per coordinate.
struct PassState {
    PassState(std::size_t n_states, HlScheme scheme);

    std::vector<double> gamma_hat;
    std::vector<double> last_residual;
    std::vector<double> last_base;
    std::vector<char> seen;
    HlScheme scheme;
};

// Each step records the visit on the table, queries the base rate and applies
// q(z) <- q(z) - rate * direction.
StepReport step_rl(IterateTable& table, StepSizePolicy& policy, const Transition& t);

// Draws the slot itself when slot < 0.
StepReport step_saga(IterateTable& table, SagaMemory& memory, StepSizePolicy& policy,
                     const Transition& t, Rng& slot_rng, int slot = -1);

StepReport step_pass(IterateTable& table, PassState& pass, StepSizePolicy& policy,
                     const Transition& t);

// Vectorial PASS over the coordinates flagged in `support`. The branch is
// shared: the sign of <gamma_hat * m_n, m_prev> summed over the support, where
// m_prev holds the residual each coordinate had when it was last in a support.
std::vector<StepReport> step_pass_vectorial(IterateTable& table, PassState& pass,
                                            StepSizePolicy& policy,
                                            std::span<const double> residuals,
                                            std::span<const char> support, std::int64_t step);

}  // namespace sastep
