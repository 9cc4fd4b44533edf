#pragma once
#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>

namespace crossfv {

using Eigen::ArrayXd;
using Eigen::Index;

/// One mesh axis: cell interfaces x_{i+1/2}, centers x_i, widths and
/// center-to-center spacings. Faces must be strictly increasing; widths
/// are positive by construction.
struct Grid1D {
    ArrayXd faces;    // n+1 interfaces
    ArrayXd centers;  // n cell centers, midpoint of adjacent faces
    ArrayXd dx;       // n cell widths
    ArrayXd dx_half;  // n-1 center spacings

    explicit Grid1D(ArrayXd face_positions);

    Index n() const { return centers.size(); }
    double x_min() const { return faces(0); }
    double x_max() const { return faces(faces.size() - 1); }
    double length() const { return x_max() - x_min(); }
};

/// Tensor product of two axes. Cells are stored row-major with y fastest:
/// cell (i, j) lives at flat index i*ny + j.
struct Grid2D {
    Grid1D x;
    Grid1D y;

    Index n() const { return x.n() * y.n(); }
    Index index(Index i, Index j) const { return i * y.n() + j; }
    double cell_volume(Index i, Index j) const { return x.dx(i) * y.dx(j); }
};

/// Immutable shared handle over a 1D or 2D mesh. Cheap to copy; safe to
/// share across threads.
class Grid {
public:
    explicit Grid(Grid1D axis);
    explicit Grid(Grid2D mesh);

    int dim() const { return data_->y ? 2 : 1; }
    Index n_cells() const { return data_->volumes.size(); }
    const Grid1D& x() const { return data_->x; }
    const Grid1D& y() const;

    Index index(Index i, Index j) const { return i * data_->y->n() + j; }

    /// Cell measures |C_i|, flattened in storage order.
    const ArrayXd& volumes() const { return data_->volumes; }
    /// Total domain measure (sums exactly to the product of side lengths
    /// up to floating-point accumulation).
    double measure() const { return data_->measure; }
    /// Domain diameter, used for the Poincare constant on convex boxes.
    double diameter() const { return data_->diameter; }

    bool same_as(const Grid& other) const;

private:
    struct Data {
        Grid1D x;
        std::optional<Grid1D> y;
        ArrayXd volumes;
        double measure = 0;
        double diameter = 0;
    };
    std::shared_ptr<const Data> data_;
};

Grid build_uniform_grid_1d(double x_min, double x_max, int n_cells);
Grid build_uniform_grid_2d(double x_min, double x_max, double y_min, double y_max,
                           int nx, int ny);

/// Per-cell averages of one species on a grid.
struct Field {
    Grid grid;
    ArrayXd values;
};

Field make_field(const Grid& grid, double fill = 0.0);

using Func1D = std::function<double(double)>;
using Func2D = std::function<double(double, double)>;

/// Cell averages of a continuous function, fixed-order Gauss-Legendre
/// (3 points per cell and axis, exact through degree 5). Throws
/// std::domain_error if f returns a non-finite value.
Field cell_average(const Grid& grid, const Func1D& f);
Field cell_average(const Grid& grid, const Func2D& f);

/// Point samples at cell centers (b and V are sampled, not averaged).
Field sample_centers(const Grid& grid, const Func1D& f);
Field sample_centers(const Grid& grid, const Func2D& f);

/// Samples at interior x-faces. 1D: length n-1. 2D: (nx-1)*ny, index fi*ny+j.
ArrayXd sample_interior_faces_x(const Grid& grid, const Func1D& f);
ArrayXd sample_interior_faces_x(const Grid& grid, const Func2D& f);
/// Samples at interior y-faces (2D only): nx*(ny-1), index i*(ny-1)+fj.
ArrayXd sample_interior_faces_y(const Grid& grid, const Func2D& f);

/// Difference quotients (v_{i+1} - v_i) / dx_{i+1/2} across interior faces,
/// laid out like the face-sample arrays above.
ArrayXd face_differences_x(const Field& f);
ArrayXd face_differences_y(const Field& f);

/// Compensated (Kahan) weighted sum; keeps discrete mass and entropy
/// reductions accurate enough for the 1e-13 conservation checks.
double weighted_sum(const ArrayXd& values, const ArrayXd& weights);

/// Discrete mass sum_i |C_i| r_i.
double total_mass(const Field& f);

} // namespace crossfv
