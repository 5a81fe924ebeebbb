#include "sastep/algorithms.hpp"

#include <stdexcept>

namespace sastep {

SagaMemory::SagaMemory(std::size_t n_states, int depth, double initial, double initial_anchor)
    : depth_(depth),
      slots_(n_states * static_cast<std::size_t>(depth > 0 ? depth : 0), initial),
      anchors_(slots_.size(), initial_anchor) {
    if (depth < 1) throw std::invalid_argument("SAGA memory depth must be >= 1");
}

double SagaMemory::anchor(StateIndex z, int j) const {
    return anchors_.at(z * static_cast<std::size_t>(depth_) + static_cast<std::size_t>(j));
}

double SagaMemory::slot(StateIndex z, int j) const {
    return slots_.at(z * static_cast<std::size_t>(depth_) + static_cast<std::size_t>(j));
}

void SagaMemory::set_slot(StateIndex z, int j, double value, double anchor) {
    if (j < 0 || j >= depth_) throw std::out_of_range("SAGA slot out of range");
    const std::size_t k = z * static_cast<std::size_t>(depth_) + static_cast<std::size_t>(j);
    slots_.at(k) = value;
    anchors_[k] = anchor;
}

std::span<const double> SagaMemory::slots(StateIndex z) const {
    const std::size_t off = z * static_cast<std::size_t>(depth_);
    if (off + static_cast<std::size_t>(depth_) > slots_.size())
        throw std::out_of_range("SAGA state out of range");
    return {slots_.data() + off, static_cast<std::size_t>(depth_)};
}

double SagaMemory::mean(StateIndex z) const {
    double s = 0.0;
    for (double x : slots(z)) s += x;
    return s / depth_;
}

PassState::PassState(std::size_t n_states, HlScheme s)
    : gamma_hat(n_states, 0.0),
      last_residual(n_states, 0.0),
      last_base(n_states, 0.0),
      seen(n_states, 0),
      scheme(s) {}

namespace {

double pass_ratio(const PassState& pass, StateIndex z) {
    if (!pass.seen[z] || pass.last_base[z] <= 0.0) return 1.0;
    return pass.gamma_hat[z] / pass.last_base[z];
}

// Applies the branch to one coordinate and returns the rate to use.
double adapt(PassState& pass, StateIndex z, double base, Branch branch) {
    double g = 0.0;
    if (base <= 0.0)
        g = 0.0;
    else if (branch == Branch::first_visit)
        g = base;
    else if (branch == Branch::increase)
        g = h_increase(pass.gamma_hat[z], base, pass.scheme);
    else
        g = l_decrease(pass.gamma_hat[z], base, pass.scheme);
    pass.gamma_hat[z] = g;
    pass.last_base[z] = base;
    return g;
}

}  // namespace

StepReport step_rl(IterateTable& table, StepSizePolicy& policy, const Transition& t) {
    table.record_visit(t.state, t.step);
    policy.observe_residual(t.state, t.residual);
    const double rate = policy.base(t.state, table.visits(t.state));
    table.apply_update(t.state, rate, t.residual);
    return {t.state, rate, t.residual, Branch::none};
}

StepReport step_saga(IterateTable& table, SagaMemory& memory, StepSizePolicy& policy,
                     const Transition& t, Rng& slot_rng, int slot) {
    if (slot < 0) slot = static_cast<int>(uniform_index(slot_rng, static_cast<std::uint64_t>(memory.depth())));
    table.record_visit(t.state, t.step);
    policy.observe_residual(t.state, t.residual);
    const double rate = policy.base(t.state, table.visits(t.state));
    const double direction = t.residual - memory.slot(t.state, slot) + memory.mean(t.state);
    const double before = table.value(t.state);
    table.apply_update(t.state, rate, direction);
    memory.set_slot(t.state, slot, t.residual, before);
    return {t.state, rate, t.residual, Branch::none};
}

StepReport step_pass(IterateTable& table, PassState& pass, StepSizePolicy& policy,
                     const Transition& t) {
    const StateIndex z = t.state;
    table.record_visit(z, t.step);
    policy.observe_residual(z, t.residual);
    const double base = policy.base(z, table.visits(z), pass_ratio(pass, z));

    Branch branch = Branch::first_visit;
    if (pass.seen.at(z))
        branch = t.residual * pass.last_residual[z] >= 0.0 ? Branch::increase : Branch::decrease;
    const double rate = adapt(pass, z, base, branch);

    table.apply_update(z, rate, t.residual);
    pass.last_residual[z] = t.residual;
    pass.seen[z] = 1;
    return {z, rate, t.residual, branch};
}

std::vector<StepReport> step_pass_vectorial(IterateTable& table, PassState& pass,
                                            StepSizePolicy& policy,
                                            std::span<const double> residuals,
                                            std::span<const char> support, std::int64_t step) {
    if (residuals.size() != table.size() || support.size() != table.size())
        throw std::invalid_argument("vectorial PASS: dimension mismatch");

    double inner = 0.0;
    bool any_seen = false;
    for (std::size_t z = 0; z < residuals.size(); ++z) {
        if (!support[z] || !pass.seen[z]) continue;
        any_seen = true;
        inner += pass.gamma_hat[z] * residuals[z] * pass.last_residual[z];
    }
    const Branch shared = inner >= 0.0 ? Branch::increase : Branch::decrease;

    std::vector<StepReport> reports;
    for (std::size_t z = 0; z < residuals.size(); ++z) {
        if (!support[z]) continue;
        table.record_visit(z, step);
        policy.observe_residual(z, residuals[z]);
        const double base = policy.base(z, table.visits(z), pass_ratio(pass, z));
        const Branch branch = (pass.seen[z] && any_seen) ? shared : Branch::first_visit;
        const double rate = adapt(pass, z, base, branch);
        table.apply_update(z, rate, residuals[z]);
        pass.last_residual[z] = residuals[z];
        pass.seen[z] = 1;
        reports.push_back({z, rate, residuals[z], branch});
    }
    return reports;
}

}  // namespace sastep
