#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sastep/random.hpp"

namespace sastep {

using StateIndex = std::size_t;

// One observed residual at a visited coordinate.
struct Transition {
    StateIndex state = 0;
    double residual = 0.0;
    std::int64_t step = 0;
    std::int64_t episode = 0;
};

// Flat table of estimates q(z) with per-coordinate visit bookkeeping.
// Only apply_update and set_value touch values, and only at one index.
class IterateTable {
public:
    explicit IterateTable(std::size_t size, double initial = 0.0);

    std::size_t size() const { return values_.size(); }

    double value(StateIndex z) const;
    void set_value(StateIndex z, double v);
    const std::vector<double>& values() const { return values_; }

    std::uint64_t visits(StateIndex z) const;
    // -1 until the first visit.
    std::int64_t last_visit_step(StateIndex z) const;

    void record_visit(StateIndex z, std::int64_t step);

    // q(z) <- q(z) - rate * residual. Throws std::domain_error on non-finite input.
    void apply_update(StateIndex z, double rate, double residual);

private:
    void check(StateIndex z) const;

    std::vector<double> values_;
    std::vector<std::uint64_t> visits_;
    std::vector<std::int64_t> last_step_;
};

// Environment hook: draw one sample at z and return m(q, X, z) = q(z) - H(q, X, z).
class ResidualOracle {
public:
    virtual ~ResidualOracle() = default;
    virtual double residual(const IterateTable& table, StateIndex z, Rng& rng) const = 0;
};

}  // namespace sastep
