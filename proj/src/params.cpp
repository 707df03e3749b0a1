#include "rwave/params.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace rwave {

namespace {

struct SystemNameRow {
    SystemId id;
    const char* name;
};

constexpr SystemNameRow kSystemNames[] = {
    {SystemId::CondJEst, "COND_J_EST"},
    {SystemId::CondDEst, "COND_D_EST"},
    {SystemId::CondHolderMain, "COND_HOLDER_MAIN"},
    {SystemId::Pi1, "PI_1"},
    {SystemId::Pi2, "PI_2"},
    {SystemId::Pi3, "PI_3"},
    {SystemId::Pi4, "PI_4"},
    {SystemId::AppC1, "APPC_1"},
    {SystemId::AppC2, "APPC_2"},
    {SystemId::AppC3, "APPC_3"},
    {SystemId::AppC4, "APPC_4"},
    {SystemId::AppC5, "APPC_5"},
    {SystemId::AppC6, "APPC_6"},
    {SystemId::AlphaQ39, "ALPHA_Q_39"},
    {SystemId::Theta310, "THETA_310"},
};

// Collects strict-inequality checks; equality is a violation with gap zero.
struct Checker {
    const ParamSet& set;
    std::vector<Violation>& violations;

    void less(const std::string& inequality, double lhs, double rhs) const {
        if (!(lhs < rhs)) violations.push_back({inequality, lhs, rhs});
    }
    void greater(const std::string& inequality, double lhs, double rhs) const {
        if (!(lhs > rhs)) violations.push_back({inequality, lhs, rhs});
    }

    // Membership of eta_k in the auxiliary families: the first family bounds
    // theta from below, the second/third bound alpha + eta from one side,
    // and every family requires eta > gamma (added once per symbol).
    void eta_membership(int k, bool in_pi2, bool in_pi3, bool in_pi4) const {
        const std::string sym = "eta" + std::to_string(k);
        const double eta = set.eta[static_cast<std::size_t>(k - 1)];
        if (in_pi2)
            greater("theta > 1 + alpha - 2/q + 2*" + sym, set.theta,
                    1.0 + set.alpha - 2.0 / set.q + 2.0 * eta);
        if (in_pi3) greater("alpha + " + sym + " > 1/q", set.alpha + eta, 1.0 / set.q);
        if (in_pi4) less("alpha + " + sym + " < 1/q", set.alpha + eta, 1.0 / set.q);
        greater(sym + " > gamma", eta, set.gamma);
    }
};

} // namespace

void ParamSet::validate() const {
    if (!(p > 1.0)) throw std::invalid_argument("ParamSet: p must exceed 1");
    if (!std::isfinite(hurst) || !std::isfinite(p) || !std::isfinite(q) ||
        !std::isfinite(alpha) || !std::isfinite(theta) || !std::isfinite(gamma) ||
        !std::isfinite(beta))
        throw std::invalid_argument("ParamSet: non-finite field");
    for (const double e : eta)
        if (!std::isfinite(e)) throw std::invalid_argument("ParamSet: non-finite field");
    if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
        throw std::invalid_argument("ParamSet: q is not the conjugate of p");
}

std::string system_id_name(SystemId id) {
    for (const auto& row : kSystemNames)
        if (row.id == id) return row.name;
    throw std::invalid_argument("system_id_name: unknown system id");
}

SystemId to_system_id(const std::string& name) {
    for (const auto& row : kSystemNames)
        if (name == row.name) return row.id;
    throw std::invalid_argument("unknown system id: " + name);
}

const std::vector<SystemId>& all_system_ids() {
    static const std::vector<SystemId> ids = [] {
        std::vector<SystemId> v;
        for (const auto& row : kSystemNames) v.push_back(row.id);
        return v;
    }();
    return ids;
}

ConditionReport check_system(SystemId id, const ParamSet& set) {
    set.validate();
    ConditionReport report;
    report.system = id;
    Checker c{set, report.violations};
    const double h = set.hurst;

    switch (id) {
    case SystemId::CondJEst:
        c.greater("p > 1/H", set.p, 1.0 / h);
        c.greater("alpha > 1 - H", set.alpha, 1.0 - h);
        c.less("alpha < 1 - 1/p", set.alpha, 1.0 - 1.0 / set.p);
        c.greater("theta > 1 - 2/q + alpha", set.theta, 1.0 - 2.0 / set.q + set.alpha);
        c.less("theta < H + alpha - 1/2", set.theta, h + set.alpha - 0.5);
        break;
    case SystemId::CondDEst:
        c.greater("p > 1/H", set.p, 1.0 / h);
        c.greater("alpha > 3/2 - 2H", set.alpha, 1.5 - 2.0 * h);
        c.less("alpha < 1 - 1/p", set.alpha, 1.0 - 1.0 / set.p);
        c.greater("theta > 1 - 2/q + alpha", set.theta, 1.0 - 2.0 / set.q + set.alpha);
        c.less("theta < 2H + alpha - 1", set.theta, 2.0 * h + set.alpha - 1.0);
        break;
    case SystemId::CondHolderMain:
        c.greater("p > 1/H", set.p, 1.0 / h);
        c.greater("alpha > 1 - H", set.alpha, 1.0 - h);
        c.less("alpha < 1 - 1/p", set.alpha, 1.0 - 1.0 / set.p);
        c.less("gamma < H - 1/p", set.gamma, h - 1.0 / set.p);
        break;
    case SystemId::Pi1:
        c.greater("alpha > 1 - H", set.alpha, 1.0 - h);
        c.less("alpha < 1/q", set.alpha, 1.0 / set.q);
        c.less("alpha + gamma < 1/q", set.alpha + set.gamma, 1.0 / set.q);
        c.greater("theta > 1/p", set.theta, 1.0 / set.p);
        c.less("theta < H + alpha - 1/2", set.theta, h + set.alpha - 0.5);
        break;
    case SystemId::Pi2:
        c.eta_membership(1, true, false, false);
        break;
    case SystemId::Pi3:
        c.eta_membership(1, false, true, false);
        break;
    case SystemId::Pi4:
        c.eta_membership(1, false, false, true);
        break;
    case SystemId::AppC1:
        c.eta_membership(1, true, true, false);
        c.eta_membership(2, true, false, true);
        c.eta_membership(3, false, true, false);
        break;
    case SystemId::AppC2:
        c.eta_membership(4, true, true, false);
        c.eta_membership(5, true, true, false);
        break;
    case SystemId::AppC3:
        c.eta_membership(1, true, true, false);
        c.eta_membership(2, false, true, false);
        c.eta_membership(3, true, false, true);
        break;
    case SystemId::AppC4:
        c.eta_membership(4, true, true, false);
        break;
    case SystemId::AppC5:
        c.eta_membership(2, false, true, false);
        c.eta_membership(3, false, false, true);
        c.eta_membership(4, true, true, false);
        break;
    case SystemId::AppC6:
        c.eta_membership(4, true, true, false);
        c.eta_membership(5, true, true, false);
        break;
    case SystemId::AlphaQ39:
        c.greater("alpha > 0", set.alpha, 0.0);
        c.less("alpha < 1/q", set.alpha, 1.0 / set.q);
        break;
    case SystemId::Theta310:
        c.greater("theta > 1 - 2/q + alpha", set.theta, 1.0 - 2.0 / set.q + set.alpha);
        break;
    }
    report.pass = report.violations.empty();
    return report;
}

ConditionReport check_system(const std::string& id, const ParamSet& set) {
    return check_system(to_system_id(id), set);
}

ParamSet feasible_point(double hurst, double p, double eps) {
    if (!(p > 1.0 / hurst))
        throw std::invalid_argument("feasible_point: requires p > 1/H");
    if (!(eps > 0.0)) throw std::invalid_argument("feasible_point: eps must be positive");

    ParamSet set;
    set.hurst = hurst;
    set.p = p;
    set.q = p / (p - 1.0);
    set.gamma = hurst - 1.0 / p - 7.0 * eps;
    set.alpha = 1.0 - hurst + 4.0 * eps;
    set.theta = hurst - eps;
    set.eta[0] = hurst - 1.0 / p - 3.0 * eps;
    set.eta[1] = hurst - 1.0 / p - 6.0 * eps;
    set.eta[2] = hurst - 1.0 / p - 3.0 * eps;
    set.eta[3] = set.eta[0];
    set.eta[4] = set.eta[0];
    set.beta = set.alpha;

    for (const SystemId id :
         {SystemId::CondJEst, SystemId::Pi1, SystemId::AppC1, SystemId::AppC2}) {
        const ConditionReport report = check_system(id, set);
        if (!report.pass) {
            const Violation& v = report.violations.front();
            throw std::runtime_error("feasible_point: eps too large; system " +
                                     system_id_name(id) + " fails: " + v.inequality +
                                     " (lhs=" + std::to_string(v.lhs) +
                                     ", rhs=" + std::to_string(v.rhs) + ")");
        }
    }
    return set;
}

double feasibility_threshold(double hurst) {
    if (!(hurst > 0.25) || !(hurst < 0.5))
        throw std::invalid_argument("feasibility_threshold: hurst must lie in (1/4, 1/2)");
    return 2.0 / (4.0 * hurst - 1.0);
}

FeasibilityScan feasibility_scan(const std::vector<double>& hurst_grid,
                                 const std::vector<double>& p_grid) {
    for (const double h : hurst_grid)
        if (!(h > 0.25) || !(h < 0.5))
            throw std::invalid_argument("feasibility_scan: hurst grid must lie in (1/4, 1/2)");
    for (const double p : p_grid)
        if (!(p >= 2.0)) throw std::invalid_argument("feasibility_scan: p grid must be >= 2");

    FeasibilityScan scan;
    scan.cells.reserve(hurst_grid.size() * p_grid.size());
    for (const double h : hurst_grid) {
        const double threshold = feasibility_threshold(h);
        scan.boundary.emplace_back(h, threshold);
        for (const double p : p_grid) {
            const double q = p / (p - 1.0);
            const bool alpha_window = 1.5 - 2.0 * h < 1.0 - 1.0 / p;
            const bool theta_window = 1.0 - 2.0 / q < 2.0 * h - 1.0;
            const bool feasible = p > threshold && p > 1.0 / h && alpha_window && theta_window;
            scan.cells.push_back({h, p, feasible});
        }
    }
    return scan;
}

void feasibility_table_csv(const FeasibilityScan& scan, std::ostream& os) {
    os << std::setprecision(17) << "hurst,p,feasible\n";
    for (const auto& cell : scan.cells)
        os << cell.hurst << ',' << cell.p << ',' << (cell.feasible ? 1 : 0) << '\n';
}

void feasibility_boundary_csv(const FeasibilityScan& scan, std::ostream& os) {
    os << std::setprecision(17) << "hurst,p_threshold\n";
    for (const auto& [h, p] : scan.boundary) os << h << ',' << p << '\n';
}

void print_condition_report(const ConditionReport& report, std::ostream& os) {
    os << "system " << system_id_name(report.system) << ": "
       << (report.pass ? "PASS" : "FAIL") << '\n';
    os << std::setprecision(17);
    for (const auto& v : report.violations)
        os << "  violated: " << v.inequality << "  (lhs=" << v.lhs << ", rhs=" << v.rhs << ")\n";
}

} // namespace rwave
