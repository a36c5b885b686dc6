#pragma once

#include <dtm/engine.hpp>
#include <dtm/reduce.hpp>

#include <vector>

namespace dtm {

/// Fixed-step RK4 solution of a reduced system written in first-order form,
/// state index j*n + d holding u_j^(d). Between nodes it is continued by the
/// cubic Hermite interpolant of node values and node derivatives.
class DenseTrajectory {
public:
    DenseTrajectory(int n, int p, double h);

    int n() const noexcept { return n_; }
    int p() const noexcept { return p_; }
    double step() const noexcept { return h_; }
    double end() const noexcept { return times_.back(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<std::vector<double>>& states() const noexcept { return states_; }
    const std::vector<std::vector<double>>& derivs() const noexcept { return derivs_; }

    /// Lookups that fell inside the step being computed and were served by a
    /// provisional or extrapolated interpolant.
    std::size_t in_step_lookups() const noexcept { return in_step_lookups_; }

    /// u_var^(deriv)(t) for deriv <= n-1 and 0 <= t <= end().
    double sample(int var, int deriv, double t) const;
    /// All variables at derivative order d.
    std::vector<double> sample(double t, int d) const;

    void push(double t, std::vector<double> y, std::vector<double> dy);
    void note_in_step_lookup() noexcept { ++in_step_lookups_; }

    /// Hermite on the interval starting at node i, evaluated at any t
    /// (extrapolates outside the interval).
    double hermite(std::size_t i, std::size_t component, double t) const;

private:
    std::size_t locate(double t) const;

    int n_;
    int p_;
    double h_;
    std::vector<double> times_;
    std::vector<std::vector<double>> states_;
    std::vector<std::vector<double>> derivs_;
    std::size_t in_step_lookups_ = 0;
};

/// Throws ValidationError naming the first history term left unreduced or
/// neutral proportional term, which the first-order form cannot carry.
void check_oracle_compatible(const ReducedSystem& system);

/// Throws ValidationError when the system still has neutral proportional
/// terms, T exceeds the validity interval or h <= 0.
DenseTrajectory integrate_reference(const ReducedSystem& system, double h, double T);

/// Max |u_j(t) - trajectory| over `samples` equidistant points of [a, b].
std::vector<double> compare(const TaylorSolution& solution, const DenseTrajectory& trajectory, double a, double b,
                            int samples);

} // namespace dtm
