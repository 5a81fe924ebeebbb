#include "sastep/iterate_table.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sastep {

IterateTable::IterateTable(std::size_t size, double initial)
    : values_(size, initial), visits_(size, 0), last_step_(size, -1) {
    if (size == 0) throw std::invalid_argument("IterateTable: empty state space");
}

void IterateTable::check(StateIndex z) const {
    if (z >= values_.size())
        throw std::out_of_range("state index " + std::to_string(z) + " outside table of size " +
                                std::to_string(values_.size()));
}

double IterateTable::value(StateIndex z) const {
    check(z);
    return values_[z];
}

void IterateTable::set_value(StateIndex z, double v) {
    check(z);
    values_[z] = v;
}

std::uint64_t IterateTable::visits(StateIndex z) const {
    check(z);
    return visits_[z];
}

std::int64_t IterateTable::last_visit_step(StateIndex z) const {
    check(z);
    return last_step_[z];
}

void IterateTable::record_visit(StateIndex z, std::int64_t step) {
    check(z);
    ++visits_[z];
    last_step_[z] = step;
}

void IterateTable::apply_update(StateIndex z, double rate, double residual) {
    check(z);
    if (!std::isfinite(rate) || !std::isfinite(residual))
        throw std::domain_error("non-finite update at state " + std::to_string(z) +
                                " (rate=" + std::to_string(rate) +
                                ", residual=" + std::to_string(residual) + ")");
    if (rate < 0.0) throw std::invalid_argument("negative step size");
    values_[z] -= rate * residual;
}

}  // namespace sastep
