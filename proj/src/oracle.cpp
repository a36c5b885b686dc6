#include <dtm/oracle.hpp>

#include <dtm/error.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <sstream>

namespace dtm {
namespace {

constexpr int corrector_passes = 2;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double hermite_eval(double t0, double h, double y0, double f0, double y1, double f1, double t) {
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

struct Provisional {
    std::vector<double> y;
    std::vector<double> dy;
};

class Integrator {
public:
    Integrator(const ReducedSystem& sys, double h) : sys_(sys), n_(sys.n), p_(sys.p()), traj_(sys.n, sys.p(), h) {}

    void seed(const std::vector<double>& y0) {
        current_ = 0;
        traj_.push(0.0, y0, rhs(0.0, y0));
    }

    void advance(double h) {
        const std::size_t i = traj_.times().size() - 1;
        const double t = traj_.times()[i];
        const std::vector<double>& y = traj_.states()[i];
        const std::vector<double>& f0 = traj_.derivs()[i];
        current_ = i;
        step_h_ = h;
        provisional_.reset();

        std::vector<double> y1, f1;
        for (int pass = 0; pass <= corrector_passes; ++pass) {
            in_step_ = false;
            const std::vector<double>& k1 = f0;
            const auto k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
            const auto k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
            const auto k4 = rhs(t + h, axpy(y, h, k3));
            y1.resize(y.size());
            for (std::size_t c = 0; c < y.size(); ++c) {
                y1[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            f1 = rhs(t + h, y1);
            const bool used_in_step = in_step_;
            provisional_ = Provisional{y1, f1};
            if (!used_in_step) break;
        }
        traj_.push(static_cast<double>(i + 1) * h, std::move(y1), std::move(f1));
        provisional_.reset();
    }

    DenseTrajectory take() { return std::move(traj_); }

private:
    static std::vector<double> axpy(const std::vector<double>& y, double a, const std::vector<double>& k) {
        std::vector<double> out(y.size());
        for (std::size_t c = 0; c < y.size(); ++c) out[c] = y[c] + a * k[c];
        return out;
    }

    double lookup(int var, int deriv, double s, double t_stage, const std::vector<double>& y) {
        assert(s <= t_stage + 1e-12 && "proportional lookup ahead of the stage time");
        (void)t_stage;
        const std::size_t comp = static_cast<std::size_t>(var * n_ + deriv);
        if (traj_.times().empty()) return y[comp]; // seeding: s = t = 0
        if (s <= traj_.end()) return traj_.sample(var, deriv, s);

        in_step_ = true;
        traj_.note_in_step_lookup();
        const std::size_t i = current_;
        const double t0 = traj_.times()[i];
        if (provisional_) {
            return hermite_eval(t0, step_h_, traj_.states()[i][comp], traj_.derivs()[i][comp], provisional_->y[comp],
                                provisional_->dy[comp], s);
        }
        if (i > 0) return traj_.hermite(i - 1, comp, s);
        return traj_.states()[i][comp] + (s - t0) * traj_.derivs()[i][comp];
    }

    std::vector<double> rhs(double t, const std::vector<double>& y) {
        std::vector<double> dy(y.size());
        for (int j = 0; j < p_; ++j) {
            for (int d = 0; d + 1 < n_; ++d) {
                dy[static_cast<std::size_t>(j * n_ + d)] = y[static_cast<std::size_t>(j * n_ + d + 1)];
            }
            const double top = evaluate_scalar(sys_.equations[static_cast<std::size_t>(j)], t, [&](const StateRef& r) {
                if (!r.delay) return y[static_cast<std::size_t>(r.var * n_ + r.deriv)];
                const DelaySpec& delay = sys_.delays[static_cast<std::size_t>(*r.delay)];
                return lookup(r.var, r.deriv, delay.value * t, t, y);
            });
            dy[static_cast<std::size_t>(j * n_ + n_ - 1)] = top;
        }
        return dy;
    }

    const ReducedSystem& sys_;
    int n_;
    int p_;
    DenseTrajectory traj_;
    std::size_t current_ = 0;
    double step_h_ = 0.0;
    bool in_step_ = false;
    std::optional<Provisional> provisional_;
};

} // namespace

DenseTrajectory::DenseTrajectory(int n, int p, double h) : n_(n), p_(p), h_(h) {}

void DenseTrajectory::push(double t, std::vector<double> y, std::vector<double> dy) {
    times_.push_back(t);
    states_.push_back(std::move(y));
    derivs_.push_back(std::move(dy));
}

std::size_t DenseTrajectory::locate(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    if (i + 1 >= times_.size() && i > 0) i = times_.size() - 2;
    return i;
}

double DenseTrajectory::hermite(std::size_t i, std::size_t component, double t) const {
    return hermite_eval(times_[i], times_[i + 1] - times_[i], states_[i][component], derivs_[i][component],
                        states_[i + 1][component], derivs_[i + 1][component], t);
}

double DenseTrajectory::sample(int var, int deriv, double t) const {
    if (var < 0 || var >= p_ || deriv < 0 || deriv >= n_) {
        throw ValidationError("sample: component out of range");
    }
    if (!times_.empty() && t > times_.back() && t - times_.back() <= 1e-12 * std::max(1.0, std::abs(t))) {
        t = times_.back();
    }
    if (times_.empty() || t < times_.front() || t > times_.back()) {
        throw ValidationError("sample: t = " + fmt(t) + " outside the integrated range");
    }
    const auto comp = static_cast<std::size_t>(var * n_ + deriv);
    const std::size_t i = locate(t);
    if (t == times_[i]) return states_[i][comp];
    if (i + 1 < times_.size() && t == times_[i + 1]) return states_[i + 1][comp];
    return hermite(i, comp, t);
}

std::vector<double> DenseTrajectory::sample(double t, int d) const {
    std::vector<double> out;
    for (int j = 0; j < p_; ++j) out.push_back(sample(j, d, t));
    return out;
}

void check_oracle_compatible(const ReducedSystem& system) {
    for (const auto& eq : system.equations) {
        for_each_state_ref(eq, [&](const StateRef& r) {
            if (!r.delay) return;
            const DelaySpec& d = system.delays.at(static_cast<std::size_t>(*r.delay));
            if (d.kind != DelayKind::proportional) {
                throw ValidationError("oracle needs a reduced system; found history term " + to_string(make_state(r)));
            }
            if (r.deriv >= system.n) {
                throw ValidationError("oracle cannot integrate neutral term " + to_string(make_state(r)));
            }
        });
    }
}

DenseTrajectory integrate_reference(const ReducedSystem& system, double h, double T) {
    if (!(h > 0.0)) throw ValidationError("oracle step h must be positive");
    if (!(T > 0.0) || T > system.validity.upper) {
        throw ValidationError("oracle horizon " + fmt(T) + " outside (0, " + fmt(system.validity.upper) + "]");
    }
    check_oracle_compatible(system);
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / h - 1e-9)));
    const double step = T / static_cast<double>(steps);

    std::vector<double> y0(static_cast<std::size_t>(system.n * system.p()));
    for (int j = 0; j < system.p(); ++j) {
        for (int d = 0; d < system.n; ++d) {
            y0[static_cast<std::size_t>(j * system.n + d)] =
                system.init.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(d));
        }
    }
    Integrator integrator(system, step);
    integrator.seed(y0);
    for (std::size_t i = 0; i < steps; ++i) integrator.advance(step);
    return integrator.take();
}

std::vector<double> compare(const TaylorSolution& solution, const DenseTrajectory& trajectory, double a, double b,
                            int samples) {
    if (samples < 2) throw ValidationError("compare needs at least two samples");
    const double end = std::min(trajectory.end(), solution.validity.upper) * (1.0 + 1e-12);
    if (!(a >= 0.0 && a <= b && b <= end)) {
        throw ValidationError("compare interval [" + fmt(a) + ", " + fmt(b) + "] outside [0, " +
                              fmt(std::min(trajectory.end(), solution.validity.upper)) + "]");
    }
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = a + (b - a) * i / (samples - 1);
    grid.back() = b;

    std::vector<double> out;
    for (int j = 0; j < static_cast<int>(solution.coefficients.size()); ++j) {
        const std::vector<double> poly = evaluate_many(solution.coefficients[static_cast<std::size_t>(j)], grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(worst, std::abs(poly[i] - trajectory.sample(j, 0, grid[i])));
        }
        out.push_back(worst);
    }
    return out;
}

} // namespace dtm
