#include "crossfv/model.hpp"

#include <cmath>
#include <stdexcept>

namespace crossfv {

namespace {

double gradient_sup(const ArrayXd& gx, const ArrayXd& gy, int dim) {
    const double mx = gx.size() ? gx.abs().maxCoeff() : 0.0;
    if (dim == 1) return mx;
    const double my = gy.size() ? gy.abs().maxCoeff() : 0.0;
    return std::hypot(mx, my);
}

void finish_scalar_caches(ScalarModelParams& p) {
    p.b_sup = p.b.values.size() ? p.b.values.maxCoeff() : 0.0;
    if (p.b_face_x.size()) p.b_sup = std::max(p.b_sup, p.b_face_x.maxCoeff());
    if (p.b_face_y.size()) p.b_sup = std::max(p.b_sup, p.b_face_y.maxCoeff());
    const ArrayXd gbx = face_differences_x(p.b);
    const ArrayXd gby = p.dim() == 2 ? face_differences_y(p.b) : ArrayXd();
    p.grad_b_sup = gradient_sup(gbx, gby, p.dim());
    p.v_sup = p.V.values.abs().maxCoeff();
    p.v_min = p.V.values.minCoeff();
    p.v_max = p.V.values.maxCoeff();
    p.grad_v_sup = gradient_sup(p.grad_V_x, p.grad_V_y, p.dim());
}

void check_deltas(double d1, double d2, double d3, double eps) {
    if (d1 < 0 || d2 < 0 || d3 < 0)
        throw std::invalid_argument("scalar model: delta coefficients must be >= 0");
    if (!(eps > 0))
        throw std::invalid_argument("scalar model: epsilon must be > 0");
}

} // namespace

ScalarModelParams make_scalar_params(const Grid& grid, double delta1, double delta2,
                                     double delta3, double epsilon,
                                     const Func1D& b, const Func1D& V) {
    check_deltas(delta1, delta2, delta3, epsilon);
    ScalarModelParams p;
    p.delta1 = delta1;
    p.delta2 = delta2;
    p.delta3 = delta3;
    p.epsilon = epsilon;
    p.b = sample_centers(grid, b);
    p.V = sample_centers(grid, V);
    p.b_face_x = sample_interior_faces_x(grid, b);
    p.grad_V_x = face_differences_x(p.V);
    if ((p.b.values < 0).any())
        throw std::invalid_argument("scalar model: frozen species b must be >= 0");
    finish_scalar_caches(p);
    return p;
}

ScalarModelParams make_scalar_params(const Grid& grid, double delta1, double delta2,
                                     double delta3, double epsilon,
                                     const Func2D& b, const Func2D& V) {
    check_deltas(delta1, delta2, delta3, epsilon);
    ScalarModelParams p;
    p.delta1 = delta1;
    p.delta2 = delta2;
    p.delta3 = delta3;
    p.epsilon = epsilon;
    p.b = sample_centers(grid, b);
    p.V = sample_centers(grid, V);
    p.b_face_x = sample_interior_faces_x(grid, b);
    p.b_face_y = sample_interior_faces_y(grid, b);
    p.grad_V_x = face_differences_x(p.V);
    p.grad_V_y = face_differences_y(p.V);
    if ((p.b.values < 0).any() || (p.b_face_x < 0).any() || (p.b_face_y < 0).any())
        throw std::invalid_argument("scalar model: frozen species b must be >= 0");
    finish_scalar_caches(p);
    return p;
}

namespace {

ArrayXd face_means_x(const Field& f) {
    const Grid& g = f.grid;
    const Grid1D& ax = g.x();
    if (g.dim() == 1) {
        ArrayXd out(ax.n() - 1);
        for (Index i = 0; i + 1 < ax.n(); ++i)
            out(i) = 0.5 * (f.values(i) + f.values(i + 1));
        return out;
    }
    const Index ny = g.y().n();
    ArrayXd out((ax.n() - 1) * ny);
    for (Index fi = 0; fi + 1 < ax.n(); ++fi)
        for (Index j = 0; j < ny; ++j)
            out(fi * ny + j) = 0.5 * (f.values(g.index(fi, j)) + f.values(g.index(fi + 1, j)));
    return out;
}

ArrayXd face_means_y(const Field& f) {
    const Grid& g = f.grid;
    const Grid1D& ay = g.y();
    ArrayXd out(g.x().n() * (ay.n() - 1));
    for (Index i = 0; i < g.x().n(); ++i)
        for (Index fj = 0; fj + 1 < ay.n(); ++fj)
            out(i * (ay.n() - 1) + fj) =
                0.5 * (f.values(g.index(i, fj)) + f.values(g.index(i, fj + 1)));
    return out;
}

} // namespace

ScalarModelParams make_scalar_params_from_field(const Field& b_centers, double delta1,
                                                double delta2, double delta3,
                                                double epsilon, const Field& V_centers) {
    check_deltas(delta1, delta2, delta3, epsilon);
    if (!b_centers.grid.same_as(V_centers.grid))
        throw std::invalid_argument("scalar model: b and V on different grids");
    ScalarModelParams p;
    p.delta1 = delta1;
    p.delta2 = delta2;
    p.delta3 = delta3;
    p.epsilon = epsilon;
    p.b = b_centers;
    p.V = V_centers;
    p.b_face_x = face_means_x(p.b);
    p.grad_V_x = face_differences_x(p.V);
    if (p.dim() == 2) {
        p.b_face_y = face_means_y(p.b);
        p.grad_V_y = face_differences_y(p.V);
    }
    if ((p.b.values < 0).any())
        throw std::invalid_argument("scalar model: frozen species b must be >= 0");
    finish_scalar_caches(p);
    return p;
}

double TwoSpeciesParams::max_delta() const {
    return std::max({d11, d12, d13, d21, d22, d23});
}

namespace {

template <class Fn>
TwoSpeciesParams make_two_species_impl(const Grid& grid, double D1, double D2, double d11,
                                       double d12, double d13, double d21, double d22,
                                       double d23, double epsilon, const Fn& V1,
                                       const Fn& V2) {
    for (double d : {d11, d12, d13, d21, d22, d23})
        if (d < 0) throw std::invalid_argument("two-species model: delta_{i,j} must be >= 0");
    if (D1 < 0 || D2 < 0)
        throw std::invalid_argument("two-species model: diffusivities must be >= 0");
    if (!(epsilon > 0))
        throw std::invalid_argument("two-species model: epsilon must be > 0");
    TwoSpeciesParams p;
    p.D1 = D1;
    p.D2 = D2;
    p.d11 = d11; p.d12 = d12; p.d13 = d13;
    p.d21 = d21; p.d22 = d22; p.d23 = d23;
    p.epsilon = epsilon;
    p.V1 = sample_centers(grid, V1);
    p.V2 = sample_centers(grid, V2);
    p.grad_V1_x = face_differences_x(p.V1);
    p.grad_V2_x = face_differences_x(p.V2);
    if (grid.dim() == 2) {
        p.grad_V1_y = face_differences_y(p.V1);
        p.grad_V2_y = face_differences_y(p.V2);
    }
    p.entropy_dim = grid.dim();
    return p;
}

} // namespace

TwoSpeciesParams make_two_species_params(const Grid& grid, double D1, double D2, double d11,
                                         double d12, double d13, double d21, double d22,
                                         double d23, double epsilon, const Func1D& V1,
                                         const Func1D& V2) {
    return make_two_species_impl(grid, D1, D2, d11, d12, d13, d21, d22, d23, epsilon, V1, V2);
}

TwoSpeciesParams make_two_species_params(const Grid& grid, double D1, double D2, double d11,
                                         double d12, double d13, double d21, double d22,
                                         double d23, double epsilon, const Func2D& V1,
                                         const Func2D& V2) {
    return make_two_species_impl(grid, D1, D2, d11, d12, d13, d21, d22, d23, epsilon, V1, V2);
}

double xi(double r, double b_center, const ScalarModelParams& p) {
    if (r < 0)
        throw std::domain_error("xi: negative density");
    return std::log(r + p.epsilon) + p.delta1 * r + p.delta3 * b_center;
}

double entropy_scalar(const Field& r, const ScalarModelParams& p) {
    if (!r.grid.same_as(p.grid()))
        throw std::invalid_argument("entropy_scalar: grid mismatch");
    if ((r.values < 0).any())
        throw std::domain_error("entropy_scalar: negative density");
    ArrayXd integrand = r.values * (r.values + p.epsilon).log() +
                        0.5 * p.delta1 * r.values.square() +
                        p.delta3 * r.values * p.b.values + r.values * p.V.values;
    return weighted_sum(integrand, r.grid.volumes());
}

double entropy_two_species(const Field& u1, const Field& u2, const TwoSpeciesParams& p) {
    if (!u1.grid.same_as(p.grid()) || !u2.grid.same_as(p.grid()))
        throw std::invalid_argument("entropy_two_species: grid mismatch");
    if ((u1.values < 0).any() || (u2.values < 0).any())
        throw std::domain_error("entropy_two_species: negative density");
    const double cross = (p.entropy_dim - 1) * (p.d12 + p.d22);
    ArrayXd integrand = u1.values * (u1.values + p.epsilon).log() +
                        u2.values * (u2.values + p.epsilon).log() +
                        u1.values * p.V1.values + u2.values * p.V2.values +
                        0.5 * (p.d11 * u1.values.square() +
                               2.0 * cross * u1.values * u2.values +
                               p.d21 * u2.values.square());
    return weighted_sum(integrand, u1.grid.volumes());
}

Eigen::Matrix2d mobility_matrix(double u1, double u2, const TwoSpeciesParams& p) {
    Eigen::Matrix2d m;
    m << p.D1 * u1 * (1.0 - p.d12 * u2), p.D1 * p.d22 * u1 * u2,
         p.D2 * p.d12 * u1 * u2,         p.D2 * u2 * (1.0 - p.d22 * u1);
    return m;
}

CoefficientsAB coefficients_A_B(double u1, double u2, double grad_V1, double grad_V2,
                                const TwoSpeciesParams& p) {
    if (u1 < 0 || u2 < 0)
        throw std::domain_error("coefficients_A_B: negative density");
    CoefficientsAB c;
    Eigen::Matrix2d phi;
    phi << p.d11 * u1 - p.d12 * u2, p.d13 * u1,
           p.d23 * u2,              p.d21 * u2 - p.d22 * u1;
    const Eigen::Matrix2d D = Eigen::Vector2d(p.D1, p.D2).asDiagonal();
    c.A = D * (Eigen::Matrix2d::Identity() + phi);
    Eigen::Matrix2d drift;
    drift << grad_V1,                                     (p.d22 * grad_V2 - p.d12 * grad_V1) * u1,
             (p.d12 * grad_V1 - p.d22 * grad_V2) * u2,    grad_V2;
    c.B = D * drift;
    return c;
}

bool diffusion_positive_definite(const Eigen::Matrix2d& A) {
    const Eigen::Matrix2d s = 0.5 * (A + A.transpose());
    return s(0, 0) > 0 && s.determinant() > 0;
}

Eigen::MatrixXd g_correction(double u1, double u2, const Eigen::VectorXd& grad_u1,
                             const Eigen::VectorXd& grad_u2, const TwoSpeciesParams& p) {
    const int d = static_cast<int>(grad_u1.size());
    if (grad_u2.size() != d)
        throw std::invalid_argument("g_correction: gradient dimensions differ");
    const double s = (p.entropy_dim - 1) * (p.d12 + p.d22);
    const double c11 = p.d11 * p.d12 - s * p.d12;  // multiplies grad u1 in row 1
    const double c12 = (p.entropy_dim - 1) * p.d12 * (p.d12 + p.d22) - p.d21 * p.d22;
    const double c22 = p.d21 * p.d22 - s * p.d22;  // multiplies grad u2 in row 2
    const double c21 = (p.entropy_dim - 1) * p.d22 * (p.d12 + p.d22) - p.d11 * p.d12;
    Eigen::MatrixXd g(2, d);
    g.row(0) = p.D1 * u1 * u2 * (c11 * grad_u1 + c12 * grad_u2).transpose();
    g.row(1) = p.D2 * u1 * u2 * (c22 * grad_u2 + c21 * grad_u1).transpose();
    return g;
}

bool is_gradient_flow_regime(const TwoSpeciesParams& p, double tol) {
    const double c = (p.entropy_dim - 1) * (p.d12 + p.d22);
    return std::abs(p.d11 - c) <= tol && std::abs(p.d21 - c) <= tol &&
           std::abs(p.d12 - p.d22) <= tol && std::abs(p.d13 - p.d23) <= tol &&
           std::abs(p.d11 - p.d21) <= tol && std::abs(p.D1 - p.D2) <= tol;
}

LipschitzBounds lipschitz_bounds_two_species(const TwoSpeciesParams& p, double M,
                                             int grid_points) {
    LipschitzBounds out;
    const double delta = p.max_delta();
    if (delta <= 0 || M < 0) return out;

    const double gv1 = gradient_sup(p.grad_V1_x, p.grad_V1_y, p.dim());
    const double gv2 = gradient_sup(p.grad_V2_x, p.grad_V2_y, p.dim());
    // worst-case magnitude of the off-diagonal drift coefficient
    const double c_psi = p.d22 * gv2 + p.d12 * gv1;

    auto phi_norm = [&](double u1, double u2) {
        const double a = p.d11 * u1 - p.d12 * u2;
        const double b = p.d13 * u1;
        const double c = p.d23 * u2;
        const double d = p.d21 * u2 - p.d22 * u1;
        return std::sqrt(a * a + b * b + c * c + d * d) / delta;
    };
    auto psi_norm = [&](double u1, double u2) {
        return c_psi * std::hypot(u1, u2) / delta;
    };

    for (int i = 0; i < grid_points; ++i) {
        const double u1 = -M + 2.0 * M * i / (grid_points - 1);
        for (int j = 0; j < grid_points; ++j) {
            const double u2 = -M + 2.0 * M * j / (grid_points - 1);
            if (u1 * u1 + u2 * u2 > M * M * (1 + 1e-12)) continue;
            out.L0_phi = std::max(out.L0_phi, phi_norm(u1, u2));
            out.L0_psi = std::max(out.L0_psi, psi_norm(u1, u2));
        }
    }
    // Phi and Psi are linear in u, so Lipschitz constants are suprema over
    // unit directions.
    const int n_angles = 3600;
    for (int k = 0; k < n_angles; ++k) {
        const double th = 2.0 * M_PI * k / n_angles;
        out.L1_phi = std::max(out.L1_phi, phi_norm(std::cos(th), std::sin(th)));
        out.L1_psi = std::max(out.L1_psi, psi_norm(std::cos(th), std::sin(th)));
    }
    return out;
}

LipschitzBounds lipschitz_bounds_scalar(const ScalarModelParams& p, double M) {
    LipschitzBounds out;
    const double delta = std::max({p.delta1, p.delta2, p.delta3});
    if (delta <= 0) return out;
    out.L0_phi = (p.delta1 * M + p.delta2 * p.b_sup) / delta;
    out.L1_phi = p.delta1 / delta;
    out.L0_psi = (p.delta3 * p.grad_b_sup + p.delta2 * p.b_sup * p.grad_v_sup) / delta;
    out.L1_psi = 0;
    return out;
}

double gamma_M(const TheoryParams& theory, const LipschitzBounds& lip, double u_star_sup,
               double grad_u_star_sup) {
    return std::max({lip.L0_phi,
                     lip.L1_phi * grad_u_star_sup * theory.C_P,
                     lip.L0_psi * theory.C_P,
                     lip.L1_psi * u_star_sup * theory.C_P});
}

} // namespace crossfv
