#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rwave {

// One point in exponent space. q is the conjugate of p and must satisfy
// 1/p + 1/q = 1 within 1e-12. eta[0..4] are the auxiliary exponents; systems
// that do not mention a symbol ignore it.
struct ParamSet {
    double hurst = 0.0;
    double p = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    double theta = 0.0;
    double gamma = 0.0;
    std::array<double, 5> eta{0.0, 0.0, 0.0, 0.0, 0.0};
    double beta = 0.0;

    void validate() const;
};

enum class SystemId {
    CondJEst,
    CondDEst,
    CondHolderMain,
    Pi1,
    Pi2,
    Pi3,
    Pi4,
    AppC1,
    AppC2,
    AppC3,
    AppC4,
    AppC5,
    AppC6,
    AlphaQ39,
    Theta310,
};

std::string system_id_name(SystemId id);
SystemId to_system_id(const std::string& name); // throws on unknown names
const std::vector<SystemId>& all_system_ids();

struct Violation {
    std::string inequality; // the strict inequality as written, e.g. "alpha < 1 - 1/p"
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ConditionReport {
    SystemId system = SystemId::CondJEst;
    bool pass = false;
    std::vector<Violation> violations;
};

// Evaluates every strict inequality of the named system on the given reals.
// Equality counts as a violation (gap zero). Same eta symbols are namespaced
// per system: checking two systems against one ParamSet never aliases.
ConditionReport check_system(SystemId id, const ParamSet& set);
ConditionReport check_system(const std::string& id, const ParamSet& set);

// Explicit recipe: gamma = H - 1/p - 7 eps, alpha = 1 - H + 4 eps,
// theta = H - eps, eta1 = eta3 = eta4 = eta5 = H - 1/p - 3 eps,
// eta2 = H - 1/p - 6 eps, beta = alpha. eta4/eta5 reuse the eta1 assignment
// (they have the same membership requirements); the returned set is verified
// against COND_J_EST, PI_1, APPC_1 and APPC_2 before returning, and the call
// fails naming the first violated system when eps is too large.
ParamSet feasible_point(double hurst, double p, double eps);

struct FeasibilityCell {
    double hurst = 0.0;
    double p = 0.0;
    bool feasible = false;
};

struct FeasibilityScan {
    std::vector<FeasibilityCell> cells; // H-major over the input grids
    std::vector<std::pair<double, double>> boundary; // (H, threshold p) per H
};

// Moment threshold 2/(4H-1): integrability exponents above it admit a
// fixed point, at or below it the guarantee lapses.
double feasibility_threshold(double hurst);

// Strong-solution feasibility over a grid: feasible iff p exceeds the
// threshold 2/(4H-1) and the COND_D_EST windows for (alpha, theta) are
// nonempty (computed analytically, no sampling).
FeasibilityScan feasibility_scan(const std::vector<double>& hurst_grid,
                                 const std::vector<double>& p_grid);

void feasibility_table_csv(const FeasibilityScan& scan, std::ostream& os);
void feasibility_boundary_csv(const FeasibilityScan& scan, std::ostream& os);

// Structured text block for one report: one line per inequality with values.
void print_condition_report(const ConditionReport& report, std::ostream& os);

} // namespace rwave
