#pragma once
#include <Eigen/Dense>
#include <optional>

#include "crossfv/grid.hpp"

namespace crossfv {

/// Parameters of the scalar mobile/frozen-species equation
///   dr/dt = div[(1 + d1 r - d2 b) grad r + d3 r grad b + r (1 - d2 b) grad V].
/// b and V are point-sampled: b at cell centers (entropy variable) and at
/// interior faces (diffusion remainder and drift weight), V at centers with
/// face-centered differences (V_{i+1} - V_i) / dx_{i+1/2}.
struct ScalarModelParams {
    double delta1 = 0;
    double delta2 = 0;
    double delta3 = 0;
    double epsilon = 1e-7;  // log regularizer

    Field b;              // frozen species at centers
    Field V;              // potential at centers
    ArrayXd b_face_x;     // interior x-face samples
    ArrayXd b_face_y;     // 2D only
    ArrayXd grad_V_x;     // interior x-face differences of V
    ArrayXd grad_V_y;     // 2D only

    // cached bounds
    double b_sup = 0;       // max of center and face samples
    double grad_b_sup = 0;  // max face-difference magnitude of b
    double v_sup = 0;       // max |V| over centers
    double v_min = 0;
    double v_max = 0;
    double grad_v_sup = 0;

    const Grid& grid() const { return b.grid; }
    int dim() const { return b.grid.dim(); }

    /// 1 - d2*max(b) > 0, the ellipticity margin of the perturbed diffusion.
    bool elliptic_ok() const { return 1.0 - delta2 * b_sup > 0.0; }
};

ScalarModelParams make_scalar_params(const Grid& grid, double delta1, double delta2,
                                     double delta3, double epsilon,
                                     const Func1D& b, const Func1D& V);
ScalarModelParams make_scalar_params(const Grid& grid, double delta1, double delta2,
                                     double delta3, double epsilon,
                                     const Func2D& b, const Func2D& V);

/// Same model, but with the frozen species given as a discrete field;
/// face values are arithmetic means of the adjacent centers. This is the
/// configuration a frozen second species reduces to.
ScalarModelParams make_scalar_params_from_field(const Field& b_centers, double delta1,
                                                double delta2, double delta3,
                                                double epsilon, const Field& V_centers);

/// Two diffusing hard-sphere species with asymptotically small coupling
/// coefficients delta_{i,j}, i in {1,2}, j in {1,2,3}.
struct TwoSpeciesParams {
    double D1 = 1;
    double D2 = 1;
    double d11 = 0, d12 = 0, d13 = 0;
    double d21 = 0, d22 = 0, d23 = 0;
    double epsilon = 1e-7;
    int entropy_dim = 1;  // d entering the (d-1) entropy cross term

    Field V1, V2;
    ArrayXd grad_V1_x, grad_V1_y;
    ArrayXd grad_V2_x, grad_V2_y;

    const Grid& grid() const { return V1.grid; }
    int dim() const { return V1.grid.dim(); }
    double max_delta() const;
};

TwoSpeciesParams make_two_species_params(const Grid& grid, double D1, double D2,
                                         double d11, double d12, double d13,
                                         double d21, double d22, double d23,
                                         double epsilon, const Func1D& V1, const Func1D& V2);
TwoSpeciesParams make_two_species_params(const Grid& grid, double D1, double D2,
                                         double d11, double d12, double d13,
                                         double d21, double d22, double d23,
                                         double epsilon, const Func2D& V1, const Func2D& V2);

/// Entropy variable xi = log(r + eps) + d1 r + d3 b. Strictly increasing
/// in r; throws std::domain_error for r < 0 (positivity lost upstream).
double xi(double r, double b_center, const ScalarModelParams& p);

/// Discrete entropy sum_i |C_i| (r log(r+eps) + d1 r^2/2 + d3 r b + r V);
/// uses the same eps as the scheme so it is the Lyapunov function of the
/// regularized dynamics actually stepped.
double entropy_scalar(const Field& r, const ScalarModelParams& p);

/// Two-species entropy with logarithmic, potential and quadratic terms,
/// cross term weighted by (d-1)(d12 + d22).
double entropy_two_species(const Field& u1, const Field& u2, const TwoSpeciesParams& p);

Eigen::Matrix2d mobility_matrix(double u1, double u2, const TwoSpeciesParams& p);

struct CoefficientsAB {
    Eigen::Matrix2d A;  // diffusion matrix diag(D) [I + delta Phi(u)]
    Eigen::Matrix2d B;  // drift matrix diag(D) [diag(grad V) + delta Psi(u)]
};

CoefficientsAB coefficients_A_B(double u1, double u2, double grad_V1, double grad_V2,
                                const TwoSpeciesParams& p);

/// Positive definiteness of the (nonsymmetric) diffusion block, tested on
/// its symmetric part. Used for regime-violation flags, never as a guard.
bool diffusion_positive_definite(const Eigen::Matrix2d& A);

/// Second-order correction G separating the system from its induced
/// gradient flow; vanishes identically when both species share size and
/// diffusivity. Returns a 2 x d matrix (one row per species).
Eigen::MatrixXd g_correction(double u1, double u2, const Eigen::VectorXd& grad_u1,
                             const Eigen::VectorXd& grad_u2, const TwoSpeciesParams& p);

/// Checks the equal-size / equal-diffusivity relations under which the
/// correction G vanishes and the system is an exact gradient flow.
bool is_gradient_flow_regime(const TwoSpeciesParams& p, double tol = 1e-12);

/// C^0 and Lipschitz bounds of the normalized nonlinearities Phi, Psi over
/// the ball |u| <= M (Frobenius norm on matrices).
struct LipschitzBounds {
    double L0_phi = 0;
    double L1_phi = 0;
    double L0_psi = 0;
    double L1_psi = 0;
};

/// Grid maximization over the ball; Phi and Psi are affine in u, so the
/// maximum sits on the boundary and the grid value is exact up to the
/// angular resolution.
LipschitzBounds lipschitz_bounds_two_species(const TwoSpeciesParams& p, double M,
                                             int grid_points = 101);

/// Closed-form bounds for the scalar model embedded as a one-species system.
LipschitzBounds lipschitz_bounds_scalar(const ScalarModelParams& p, double M);

/// Constants entering the decay-rate theory for a given scenario.
struct TheoryParams {
    double lambda = 1;          // ellipticity lower bound
    double Lambda = 1;          // ellipticity upper bound
    double C_P = 0;             // Poincare constant, diam(Omega)/pi on boxes
    double V_inf_norm = 0;
    double grad_V_inf_norm = 0;
    double V_l = 0;
    double V_u = 0;
    double Gamma_M = 0;
    double M = 0;               // measured sup of the solution
};

/// Gamma_M = max{L0(Phi), L1(Phi) ||grad u*|| C_P, L0(Psi) C_P, L1(Psi) ||u*|| C_P}.
double gamma_M(const TheoryParams& theory, const LipschitzBounds& lip,
               double u_star_sup, double grad_u_star_sup);

} // namespace crossfv
