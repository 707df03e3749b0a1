#include "rwave/solver.hpp"

#include "rwave/norms.hpp"
#include "rwave/quadrature.hpp"
#include "rwave/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace rwave {

namespace {

// Largest m with m * dx strictly below radius; exact for integer-scaled grids.
long strict_cone_cells(double radius, double dx) {
    long m = static_cast<long>(std::floor(radius / dx));
    while (m >= 0 && m * dx >= radius) --m;
    while ((m + 1) * dx < radius) ++m;
    return m;
}

bool steps_match(const GridSpec& grid) {
    return std::abs(grid.dt - grid.dx) <= 1e-12 * grid.dx;
}

// Convolution field S(i,j) = sum over cells strictly before t_i and strictly
// inside the cone of 0.5 f. With dt == dx the cone rule is |b-j| <= i-k-1 and
// S satisfies the two-step recurrence below (out-of-range neighbors read as
// zero, which is exact on every node whose full cone lies inside the grid).
Field cone_convolution_all(const Field& f) {
    const GridSpec& grid = f.grid;
    Field s(grid);
    if (steps_match(grid)) {
        const auto n = static_cast<long>(grid.x_count);
        if (grid.t_count >= 2)
            for (long j = 0; j < n; ++j)
                s.at(1, static_cast<std::size_t>(j)) = 0.5 * f.at(0, static_cast<std::size_t>(j));
        for (std::size_t k = 1; k + 1 < grid.t_count; ++k)
            for (long j = 0; j < n; ++j) {
                const double left = j > 0 ? s.at(k, static_cast<std::size_t>(j - 1)) : 0.0;
                const double right = j + 1 < n ? s.at(k, static_cast<std::size_t>(j + 1)) : 0.0;
                s.at(k + 1, static_cast<std::size_t>(j)) =
                    left + right - s.at(k - 1, static_cast<std::size_t>(j)) +
                    0.5 * (f.at(k, static_cast<std::size_t>(j)) +
                           f.at(k - 1, static_cast<std::size_t>(j)));
            }
        return s;
    }
    const auto n = static_cast<long>(grid.x_count);
    for (std::size_t i = 1; i < grid.t_count; ++i)
        for (long j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < i; ++k) {
                const double radius = static_cast<double>(i - k) * grid.dt;
                const long m = strict_cone_cells(radius, grid.dx);
                const long b_lo = std::max(0L, j - m);
                const long b_hi = std::min(n - 1, j + m);
                for (long b = b_lo; b <= b_hi; ++b)
                    acc += f.at(k, static_cast<std::size_t>(b));
            }
            s.at(i, static_cast<std::size_t>(j)) = 0.5 * acc;
        }
    return s;
}

struct PicardResult {
    std::vector<double> window_values;
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
};

void validate_picard_inputs(const GridSpec& grid, const NoiseParams& noise_params,
                            const SigmaSpec& sigma, double eps, int n_max, double tol_Z2) {
    grid.validate();
    noise_params.validate();
    sigma.validate();
    if (!(noise_params.hurst > 0.25) || !(noise_params.hurst < 0.5))
        throw std::domain_error("picard_solve: hurst must lie in (1/4, 1/2) for the "
                                "fixed-point scheme; got " +
                                std::to_string(noise_params.hurst));
    if (!(eps > 0.0)) throw std::invalid_argument("picard_solve: eps must be positive");
    if (n_max < 1) throw std::invalid_argument("picard_solve: n_max must be >= 1");
    if (!(tol_Z2 > 0.0)) throw std::invalid_argument("picard_solve: tol_Z2 must be positive");
}

// One realization on the internal widened grid; window_values come back on
// the requested grid. `seed` is the already-derived per-realization seed.
PicardResult picard_single(const GridSpec& grid, const NoiseParams& noise_params,
                           const SigmaSpec& sigma, const InitialData& data, double eps,
                           int n_max, double tol_Z2, std::uint64_t seed) {
    const long radius = mollifier_radius_cells(eps, grid.dx);
    const double t_span = static_cast<double>(grid.t_count - 1) * grid.dt;
    const long pad = static_cast<long>(std::ceil(t_span / grid.dx - 1e-9)) + radius + 1;

    GridSpec ext = grid;
    ext.x0 = grid.x0 - static_cast<double>(pad) * grid.dx;
    ext.x_count = grid.x_count + 2 * static_cast<std::size_t>(pad);

    NoiseParams params = noise_params;
    params.seed = seed;
    const NoiseField smoothed = mollify_field(sample_noise_field(ext, params), eps);

    Field i0(ext);
    for (std::size_t i = 0; i < ext.t_count; ++i) {
        const double elapsed = static_cast<double>(i) * ext.dt;
        for (std::size_t j = 0; j < ext.x_count; ++j) {
            const double v = dalembert_I0(data, elapsed, ext.x(j));
            if (!std::isfinite(v))
                throw std::invalid_argument("picard_solve: initial data produced a non-finite "
                                            "value at t=" +
                                            std::to_string(elapsed) +
                                            ", x=" + std::to_string(ext.x(j)));
            i0.at(i, j) = v;
        }
    }

    const NormConfig residual_config{2.0, noise_params.hurst, 0.0, 0.0, 0};
    Field u_prev = i0;
    Field u_next(ext);
    Field f(ext);
    Field diff(grid);

    PicardResult result;
    int rising_streak = 0;
    for (int n = 1; n <= n_max; ++n) {
        for (std::size_t k = 0; k < ext.size(); ++k)
            f.values[k] = sigma(u_prev.values[k]) * smoothed.increments[k];
        const Field s = cone_convolution_all(f);
        for (std::size_t k = 0; k < ext.size(); ++k) u_next.values[k] = i0.values[k] + s.values[k];

        for (std::size_t i = 0; i < grid.t_count; ++i)
            for (std::size_t j = 0; j < grid.x_count; ++j)
                diff.at(i, j) = u_next.at(i, j + static_cast<std::size_t>(pad)) -
                                u_prev.at(i, j + static_cast<std::size_t>(pad));
        const double residual = z_norm_estimate({diff.view()}, residual_config).z;
        result.residuals.push_back(residual);
        result.iterations = n;

        if (n >= 3 && residual > result.residuals[n - 2])
            ++rising_streak;
        else
            rising_streak = 0;
        if (rising_streak == 3) {
            std::ostringstream msg;
            msg << "picard_solve: residual increased for 3 consecutive iterations; history:";
            msg << std::setprecision(6) << std::scientific;
            for (const double r : result.residuals) msg << ' ' << r;
            throw std::runtime_error(msg.str());
        }

        u_prev.values.swap(u_next.values);
        if (residual < tol_Z2) {
            result.converged = true;
            break;
        }
    }

    result.window_values.resize(grid.size());
    for (std::size_t i = 0; i < grid.t_count; ++i)
        for (std::size_t j = 0; j < grid.x_count; ++j) {
            const double v = u_prev.at(i, j + static_cast<std::size_t>(pad));
            if (!std::isfinite(v))
                throw std::runtime_error("picard_solve: non-finite solution value");
            result.window_values[i * grid.x_count + j] = v;
        }
    return result;
}

std::size_t thread_budget(std::size_t jobs) {
    std::size_t n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("RWAVE_THREADS")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && parsed >= 1) n = parsed;
    }
    if (n == 0) n = 1;
    return std::min(n, jobs);
}

} // namespace

SigmaSpec SigmaSpec::zero() { return {}; }

SigmaSpec SigmaSpec::linear(double a) {
    SigmaSpec s;
    s.kind = SigmaKind::Linear;
    s.amplitude = a;
    s.lipschitz_bound = std::abs(a);
    return s;
}

SigmaSpec SigmaSpec::scaled_sine(double a) {
    SigmaSpec s;
    s.kind = SigmaKind::ScaledSine;
    s.amplitude = a;
    s.lipschitz_bound = std::abs(a);
    return s;
}

SigmaSpec SigmaSpec::tabulated(std::vector<double> u, std::vector<double> v) {
    SigmaSpec s;
    s.kind = SigmaKind::Tabulated;
    s.table_u = std::move(u);
    s.table_v = std::move(v);
    for (std::size_t k = 0; k + 1 < s.table_u.size(); ++k) {
        const double slope = (s.table_v[k + 1] - s.table_v[k]) / (s.table_u[k + 1] - s.table_u[k]);
        s.lipschitz_bound = std::max(s.lipschitz_bound, std::abs(slope));
    }
    s.validate();
    return s;
}

double SigmaSpec::operator()(double u) const {
    switch (kind) {
    case SigmaKind::Zero:
        return 0.0;
    case SigmaKind::Linear:
        return amplitude * u;
    case SigmaKind::ScaledSine:
        return amplitude * std::sin(u);
    case SigmaKind::Tabulated: {
        if (u <= table_u.front()) return table_v.front();
        if (u >= table_u.back()) return table_v.back();
        const auto it = std::upper_bound(table_u.begin(), table_u.end(), u);
        const auto k = static_cast<std::size_t>(it - table_u.begin()) - 1;
        const double w = (u - table_u[k]) / (table_u[k + 1] - table_u[k]);
        return table_v[k] + w * (table_v[k + 1] - table_v[k]);
    }
    }
    return 0.0;
}

void SigmaSpec::validate() const {
    if (!std::isfinite(amplitude) || !std::isfinite(lipschitz_bound) || lipschitz_bound < 0.0)
        throw std::invalid_argument("SigmaSpec: non-finite coefficient");
    if (kind != SigmaKind::Tabulated) return;
    if (table_u.size() < 2 || table_u.size() != table_v.size())
        throw std::invalid_argument("SigmaSpec: table needs at least two matching nodes");
    for (std::size_t k = 0; k < table_u.size(); ++k) {
        if (!std::isfinite(table_u[k]) || !std::isfinite(table_v[k]))
            throw std::invalid_argument("SigmaSpec: non-finite table entry");
        if (k > 0 && !(table_u[k] > table_u[k - 1]))
            throw std::invalid_argument("SigmaSpec: table nodes must increase strictly");
    }
    if (table_u.front() > 0.0 || table_u.back() < 0.0)
        throw std::invalid_argument("SigmaSpec: table must bracket u = 0");
    double scale = 1.0;
    for (const double v : table_v) scale = std::max(scale, std::abs(v));
    if (std::abs((*this)(0.0)) > 1e-12 * scale)
        throw std::invalid_argument("SigmaSpec: sigma(0) must vanish");
}

InitialData InitialData::zero() { return {}; }

InitialData InitialData::gaussian() {
    InitialData d;
    d.kind = InitialDataKind::Gaussian;
    d.u0 = [](double x) { return std::exp(-x * x); };
    return d;
}

InitialData InitialData::constant(double c) {
    InitialData d;
    d.kind = InitialDataKind::Constant;
    d.constant_value = c;
    d.u0 = [c](double) { return c; };
    return d;
}

InitialData InitialData::custom(std::function<double(double)> u0,
                                std::function<double(double)> v0) {
    InitialData d;
    d.kind = InitialDataKind::Custom;
    d.u0 = std::move(u0);
    d.v0 = std::move(v0);
    return d;
}

double dalembert_I0(const InitialData& data, double t, double x) {
    if (!(t >= 0.0)) throw std::invalid_argument("dalembert_I0: t must be nonnegative");
    switch (data.kind) {
    case InitialDataKind::Zero:
        return 0.0;
    case InitialDataKind::Constant:
        return data.constant_value;
    case InitialDataKind::Gaussian:
        return 0.5 * (std::exp(-(x + t) * (x + t)) + std::exp(-(x - t) * (x - t)));
    case InitialDataKind::Custom: {
        double value = 0.0;
        if (data.u0) value += 0.5 * (data.u0(x + t) + data.u0(x - t));
        if (data.v0 && t > 0.0) value += 0.5 * adaptive_simpson(data.v0, x - t, x + t, 1e-12);
        return value;
    }
    }
    return 0.0;
}

double stochastic_convolution(const FieldView& v, const NoiseField& noise, std::size_t t_index,
                              std::size_t x_index) {
    if (!(v.grid == noise.grid))
        throw std::invalid_argument("stochastic_convolution: v and noise grids differ");
    const GridSpec& grid = noise.grid;
    if (t_index >= grid.t_count || x_index >= grid.x_count)
        throw std::invalid_argument("stochastic_convolution: target indices out of range");

    const auto n = static_cast<long>(grid.x_count);
    const auto xi = static_cast<long>(x_index);
    const double max_radius = static_cast<double>(t_index) * grid.dt;
    if (static_cast<double>(xi + 1) * grid.dx < max_radius ||
        static_cast<double>(n - xi) * grid.dx < max_radius)
        throw std::runtime_error(
            "stochastic_convolution: light cone of the target node extends beyond the noise grid");

    double acc = 0.0;
    for (std::size_t i = 0; i < t_index; ++i) {
        const double radius = static_cast<double>(t_index - i) * grid.dt;
        const long m = strict_cone_cells(radius, grid.dx);
        const long b_lo = std::max(0L, xi - m);
        const long b_hi = std::min(n - 1, xi + m);
        for (long b = b_lo; b <= b_hi; ++b)
            acc += v.at(i, static_cast<std::size_t>(b)) * noise.at(i, static_cast<std::size_t>(b));
    }
    return 0.5 * acc;
}

SolutionField picard_solve(const GridSpec& grid, const NoiseParams& noise_params,
                           const SigmaSpec& sigma, const InitialData& data, double eps,
                           int n_max, double tol_Z2) {
    validate_picard_inputs(grid, noise_params, sigma, eps, n_max, tol_Z2);
    PicardResult r = picard_single(grid, noise_params, sigma, data, eps, n_max, tol_Z2,
                                   derive_seed(noise_params.seed, 0));
    SolutionField out;
    out.grid = grid;
    out.sigma = sigma;
    out.eps = eps;
    out.n_realizations = 1;
    out.values = std::move(r.window_values);
    out.picard_iterations = {r.iterations};
    out.picard_residuals = {std::move(r.residuals)};
    out.converged = {static_cast<char>(r.converged)};
    return out;
}

SolutionField solve_ensemble(const GridSpec& grid, const NoiseParams& noise_params,
                             const SigmaSpec& sigma, const InitialData& data, double eps,
                             std::size_t n_realizations, int n_max, double tol_Z2) {
    validate_picard_inputs(grid, noise_params, sigma, eps, n_max, tol_Z2);
    if (n_realizations < 1)
        throw std::invalid_argument("solve_ensemble: n_realizations must be >= 1");

    SolutionField out;
    out.grid = grid;
    out.sigma = sigma;
    out.eps = eps;
    out.n_realizations = n_realizations;
    out.values.resize(n_realizations * grid.size());
    out.picard_iterations.resize(n_realizations, 0);
    out.picard_residuals.resize(n_realizations);
    out.converged.resize(n_realizations, 0);

    std::vector<std::string> errors(n_realizations);
    const auto run_one = [&](std::size_t r) {
        try {
            PicardResult res = picard_single(grid, noise_params, sigma, data, eps, n_max, tol_Z2,
                                             derive_seed(noise_params.seed, r));
            std::copy(res.window_values.begin(), res.window_values.end(),
                      out.values.begin() + static_cast<std::ptrdiff_t>(r * grid.size()));
            out.picard_iterations[r] = res.iterations;
            out.picard_residuals[r] = std::move(res.residuals);
            out.converged[r] = static_cast<char>(res.converged);
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    };

    const std::size_t workers = thread_budget(n_realizations);
    if (workers <= 1) {
        for (std::size_t r = 0; r < n_realizations; ++r) run_one(r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < n_realizations; r += workers) run_one(r);
            });
        for (auto& th : pool) th.join();
    }

    for (std::size_t r = 0; r < n_realizations; ++r)
        if (!errors[r].empty())
            throw std::runtime_error("realization " + std::to_string(r) + ": " + errors[r]);
    return out;
}

void save_solution_csv(const SolutionField& field, std::size_t realization, std::ostream& os) {
    if (realization >= field.n_realizations)
        throw std::invalid_argument("save_solution_csv: realization out of range");
    const GridSpec& grid = field.grid;
    os << std::setprecision(17);
    os << "# t_count=" << grid.t_count << " x_count=" << grid.x_count << " dt=" << grid.dt
       << " dx=" << grid.dx << " t0=" << grid.t0 << " x0=" << grid.x0 << '\n';
    os << "t,x,value\n";
    for (std::size_t i = 0; i < grid.t_count; ++i)
        for (std::size_t j = 0; j < grid.x_count; ++j)
            os << grid.t(i) << ',' << grid.x(j) << ',' << field.at(realization, i, j) << '\n';
}

void save_residuals_csv(const SolutionField& field, std::size_t realization, std::ostream& os) {
    if (realization >= field.picard_residuals.size())
        throw std::invalid_argument("save_residuals_csv: realization out of range");
    os << std::setprecision(17) << "iteration,z2_distance\n";
    const auto& residuals = field.picard_residuals[realization];
    for (std::size_t n = 0; n < residuals.size(); ++n)
        os << (n + 1) << ',' << residuals[n] << '\n';
}

} // namespace rwave
