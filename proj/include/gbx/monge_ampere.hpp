// Monge-Ampere structures on T*M for dim M = 2, 3 and Jacobi systems on
// M x R^2.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbx/compat.hpp"
#include "gbx/courant.hpp"

namespace gbx {

using SamplePoint = std::vector<std::optional<Rational>>;  // indexed like the scalar space

struct MAStructure {
    ContextPtr ctx;        // tangent bundle of T*M, base (q..., p...)
    int n = 0;             // dimension of M
    GradedElement Omega;   // sum dp_i ^ dq_i
    GradedElement pi_Omega;
    GradedElement omega;
    GradedElement effectivity;  // omega ^ Omega
    std::optional<SamplePoint> sample;
    bool effective() const { return effectivity.is_zero(); }
};

// WrongDegree unless omega is an n-form with n = 2 or 3 on a cotangent context.
MAStructure build_ma(const GradedElement& omega, std::optional<SamplePoint> sample = std::nullopt);
GradedElement canonical_symplectic(const ContextPtr& ctx);

// Pullback of a form along a graph: base coordinate index i is replaced by
// f and its fiber direction d(index i) by df.  Only coordinates with fiber
// directions of the same index are supported (tangent contexts).
GradedElement restrict_to_graph(const GradedElement& form, const std::vector<std::pair<int, ScalarExpr>>& graph);

// Delta_omega(f): p_i -> f_{q_i}, dp_i -> f_{q_i q_j} dq_j.  NotABaseFunction
// when f depends on p or on anything but q and parameters.
GradedElement ma_operator_apply(const MAStructure& S, const ScalarExpr& f);

// Sign of a scalar on the chart, falling back to exact evaluation at the
// sample point.  0 when neither decides.
int decided_sign(const ScalarExpr& a, const ScalarSpace& sp, const std::optional<SamplePoint>& sample);

struct GeneralizedVerdict {
    std::string name;
    bool applicable = false;   // the construction's preconditions hold
    std::string note;
    std::optional<GeneralizedReport> report;
    bool torsion_free = false;
};

struct MA2Report {
    explicit MA2Report(const ContextPtr& ctx) : A(ctx), pf_residual(ctx), d_omega(ctx) {}
    GradedElement A;            // {pi_Omega, omega}
    ScalarExpr pf;
    GradedElement pf_residual;  // A^2 + Pf Id
    int pf_sign = 0;
    std::string type;           // elliptic, hyperbolic, degenerate-locus
    std::optional<ScalarExpr> sqrt_abs_pf;
    std::optional<GradedElement> omega_tilde, d_omega_tilde, pi_omega_tilde, J, J_square_residual, J_torsion;
    bool integrable = false;
    ScalarExpr trace_A;
    bool unimodular = false;
    GradedElement d_omega;
    // omega + phi Omega closed for some phi iff the 1-form beta with
    // beta ^ Omega = -d omega is closed.
    std::optional<GradedElement> divergence_beta;
    bool divergence_type = false;
    std::vector<StructureReport> composites;
    std::vector<GeneralizedVerdict> generalized;
};
MA2Report analyze_2d(const MAStructure& S);

struct MA3Report {
    GradedElement vol;
    Matrix H;
    GradedElement H_endo;
    ScalarExpr lambda;
    Matrix H_square_residual;  // H^2 - lambda Id
    Matrix q;                  // Omega(H theta_a, theta_b)
    int lambda_sign = 0;
    std::optional<Inertia> q_inertia;
    std::string orbit;  // matching normal forms (hess, sl, pssl, joined by '|'), unmatched, degenerate, undecided
    std::vector<ScalarExpr> pf_frame;   // modified Pfaffian of i_{theta_a} omega
    bool pf_matches_q = false;           // pf_frame[a] == q(a,a)
};
// EffectivityRequired when omega ^ Omega != 0.
MA3Report analyze_3d(const MAStructure& S);
Matrix hitchin_endomorphism(const MAStructure& S);
// tau ^ tau ^ Omega = -1/3 Pf(tau) Omega^3.
ScalarExpr modified_pfaffian(const MAStructure& S, const GradedElement& tau);

struct Generalized3D {
    DoubleEndo J;              // pi_Omega + H with H scaled to square to +-Id
    GradedElement S;           // mu + omega
    GradedElement S_self;      // {S, S}
    ScalarExpr scale;          // 1 / sqrt|lambda| applied to the Hitchin endomorphism
    GradedElement H;           // the scaled endomorphism
    std::optional<ScalarExpr> square;  // c with J^2 = c Id, if any
    std::optional<GeneralizedReport> classification;
    std::string note;          // why classification is absent
    std::vector<std::pair<std::string, GradedElement>> residuals;
};
// NotClosed; PfaffianNotUnit when lambda is not a nonzero constant with a
// rational square root of its absolute value.
Generalized3D generalized_structure_3d(const MAStructure& S);

struct JacobiSystem {
    ContextPtr ctx;  // tangent bundle of M x R^2, base (x, y, u, v)
    GradedElement omega1, omega2;
};
JacobiSystem make_jacobi(const GradedElement& omega1, const GradedElement& omega2);

struct JacobiReport {
    explicit JacobiReport(const ContextPtr& ctx)
        : wedge12(ctx), pi1(ctx), pi2(ctx), bihamilt_self(ctx), bihamilt_mixed(ctx) {}
    GradedElement wedge12;  // omega1 ^ omega2
    std::optional<ScalarExpr> epsilon;
    bool nondegenerate = false;
    Matrix A;               // omega2(X,Y) = omega1(AX,Y)
    Matrix A_square_residual;  // A^2 - epsilon Id
    GradedElement pi1, pi2;
    GradedElement bihamilt_self;   // [pi1,pi1] - [pi2,pi2]
    GradedElement bihamilt_mixed;  // [pi1,pi2]
    bool hitchin_pair = false;
    std::optional<StructureReport> pn;
};
// DegenerateForm when either form is degenerate.
JacobiReport jacobi_analyze(const JacobiSystem& J);
// NotABaseFunction when f depends on the fiber coordinates.
std::pair<GradedElement, GradedElement> jacobi_operator_apply(const JacobiSystem& J, const ScalarExpr& u,
                                                              const ScalarExpr& v);

// Named instances.  2-D and 3-D forms live on cotangent contexts built here
// unless a context is supplied.
GradedElement ma_instance(const std::string& name, ContextPtr ctx = nullptr);
std::vector<std::string> ma_instance_names();
JacobiSystem cauchy_riemann(ContextPtr ctx = nullptr);

} // namespace gbx
