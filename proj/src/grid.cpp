#include "crossfv/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace crossfv {

namespace {

// 3-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGlW0 = 8.0 / 9.0;
constexpr double kGlW1 = 5.0 / 9.0;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::domain_error(std::string(what) + " returned a non-finite value");
}

} // namespace

Grid1D::Grid1D(ArrayXd face_positions) : faces(std::move(face_positions)) {
    if (faces.size() < 3)
        throw std::invalid_argument("Grid1D: need at least 2 cells");
    for (Index i = 0; i < faces.size(); ++i) {
        if (!std::isfinite(faces(i)))
            throw std::invalid_argument("Grid1D: non-finite face position");
        if (i > 0 && !(faces(i) > faces(i - 1)))
            throw std::invalid_argument("Grid1D: faces must be strictly increasing");
    }
    const Index n = faces.size() - 1;
    centers = 0.5 * (faces.head(n) + faces.tail(n));
    dx = faces.tail(n) - faces.head(n);
    dx_half = centers.tail(n - 1) - centers.head(n - 1);
}

Grid::Grid(Grid1D axis) {
    auto d = std::make_shared<Data>(Data{std::move(axis), std::nullopt, {}, 0, 0});
    d->volumes = d->x.dx;
    d->measure = d->x.length();
    d->diameter = d->x.length();
    data_ = std::move(d);
}

Grid::Grid(Grid2D mesh) {
    auto d = std::make_shared<Data>(Data{std::move(mesh.x), std::move(mesh.y), {}, 0, 0});
    const Index nx = d->x.n(), ny = d->y->n();
    d->volumes.resize(nx * ny);
    for (Index i = 0; i < nx; ++i)
        for (Index j = 0; j < ny; ++j)
            d->volumes(i * ny + j) = d->x.dx(i) * d->y->dx(j);
    d->measure = d->x.length() * d->y->length();
    d->diameter = std::hypot(d->x.length(), d->y->length());
    data_ = std::move(d);
}

const Grid1D& Grid::y() const {
    if (!data_->y)
        throw std::logic_error("Grid: y axis requested on a 1D grid");
    return *data_->y;
}

bool Grid::same_as(const Grid& other) const {
    if (data_ == other.data_) return true;
    if (dim() != other.dim()) return false;
    if ((x().faces.size() != other.x().faces.size()) ||
        (x().faces != other.x().faces).any())
        return false;
    if (dim() == 2 && ((y().faces.size() != other.y().faces.size()) ||
                       (y().faces != other.y().faces).any()))
        return false;
    return true;
}

namespace {

Grid1D uniform_axis(double lo, double hi, int n_cells, const char* axis) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument(std::string("uniform grid: non-finite ") + axis + " bounds");
    if (!(lo < hi))
        throw std::invalid_argument(std::string("uniform grid: need ") + axis + "_min < " + axis + "_max");
    if (n_cells < 2)
        throw std::invalid_argument("uniform grid: need at least 2 cells per axis");
    ArrayXd faces(n_cells + 1);
    const double h = (hi - lo) / n_cells;
    for (int i = 0; i <= n_cells; ++i)
        faces(i) = (i == n_cells) ? hi : lo + i * h;
    return Grid1D(std::move(faces));
}

} // namespace

Grid build_uniform_grid_1d(double x_min, double x_max, int n_cells) {
    return Grid(uniform_axis(x_min, x_max, n_cells, "x"));
}

Grid build_uniform_grid_2d(double x_min, double x_max, double y_min, double y_max,
                           int nx, int ny) {
    return Grid(Grid2D{uniform_axis(x_min, x_max, nx, "x"),
                       uniform_axis(y_min, y_max, ny, "y")});
}

Field make_field(const Grid& grid, double fill) {
    return Field{grid, ArrayXd::Constant(grid.n_cells(), fill)};
}

Field cell_average(const Grid& grid, const Func1D& f) {
    if (grid.dim() != 1)
        throw std::invalid_argument("cell_average: 1D function on a 2D grid");
    const Grid1D& ax = grid.x();
    Field out = make_field(grid);
    for (Index i = 0; i < ax.n(); ++i) {
        const double c = ax.centers(i), h = 0.5 * ax.dx(i);
        double v = kGlW0 * f(c) + kGlW1 * (f(c - h * kGlNode) + f(c + h * kGlNode));
        v *= 0.5;  // rule weights sum to 2
        check_finite(v, "cell_average: integrand");
        out.values(i) = v;
    }
    return out;
}

Field cell_average(const Grid& grid, const Func2D& f) {
    if (grid.dim() != 2)
        throw std::invalid_argument("cell_average: 2D function on a 1D grid");
    const Grid1D& ax = grid.x();
    const Grid1D& ay = grid.y();
    const double nodes[3] = {-kGlNode, 0.0, kGlNode};
    const double w[3] = {kGlW1, kGlW0, kGlW1};
    Field out = make_field(grid);
    for (Index i = 0; i < ax.n(); ++i) {
        const double cx = ax.centers(i), hx = 0.5 * ax.dx(i);
        for (Index j = 0; j < ay.n(); ++j) {
            const double cy = ay.centers(j), hy = 0.5 * ay.dx(j);
            double v = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    v += w[a] * w[b] * f(cx + hx * nodes[a], cy + hy * nodes[b]);
            v *= 0.25;
            check_finite(v, "cell_average: integrand");
            out.values(grid.index(i, j)) = v;
        }
    }
    return out;
}

Field sample_centers(const Grid& grid, const Func1D& f) {
    if (grid.dim() != 1)
        throw std::invalid_argument("sample_centers: 1D function on a 2D grid");
    Field out = make_field(grid);
    for (Index i = 0; i < grid.n_cells(); ++i) {
        out.values(i) = f(grid.x().centers(i));
        check_finite(out.values(i), "sample_centers: function");
    }
    return out;
}

Field sample_centers(const Grid& grid, const Func2D& f) {
    if (grid.dim() != 2)
        throw std::invalid_argument("sample_centers: 2D function on a 1D grid");
    Field out = make_field(grid);
    for (Index i = 0; i < grid.x().n(); ++i)
        for (Index j = 0; j < grid.y().n(); ++j) {
            const double v = f(grid.x().centers(i), grid.y().centers(j));
            check_finite(v, "sample_centers: function");
            out.values(grid.index(i, j)) = v;
        }
    return out;
}

ArrayXd sample_interior_faces_x(const Grid& grid, const Func1D& f) {
    if (grid.dim() != 1)
        throw std::invalid_argument("sample_interior_faces_x: dimension mismatch");
    const Grid1D& ax = grid.x();
    ArrayXd out(ax.n() - 1);
    for (Index i = 0; i + 1 < ax.n(); ++i) {
        out(i) = f(ax.faces(i + 1));
        check_finite(out(i), "face sample");
    }
    return out;
}

ArrayXd sample_interior_faces_x(const Grid& grid, const Func2D& f) {
    if (grid.dim() != 2)
        throw std::invalid_argument("sample_interior_faces_x: dimension mismatch");
    const Grid1D& ax = grid.x();
    const Grid1D& ay = grid.y();
    ArrayXd out((ax.n() - 1) * ay.n());
    for (Index fi = 0; fi + 1 < ax.n(); ++fi)
        for (Index j = 0; j < ay.n(); ++j) {
            const double v = f(ax.faces(fi + 1), ay.centers(j));
            check_finite(v, "face sample");
            out(fi * ay.n() + j) = v;
        }
    return out;
}

ArrayXd sample_interior_faces_y(const Grid& grid, const Func2D& f) {
    if (grid.dim() != 2)
        throw std::invalid_argument("sample_interior_faces_y: dimension mismatch");
    const Grid1D& ax = grid.x();
    const Grid1D& ay = grid.y();
    ArrayXd out(ax.n() * (ay.n() - 1));
    for (Index i = 0; i < ax.n(); ++i)
        for (Index fj = 0; fj + 1 < ay.n(); ++fj) {
            const double v = f(ax.centers(i), ay.faces(fj + 1));
            check_finite(v, "face sample");
            out(i * (ay.n() - 1) + fj) = v;
        }
    return out;
}

ArrayXd face_differences_x(const Field& f) {
    const Grid& g = f.grid;
    const Grid1D& ax = g.x();
    if (g.dim() == 1) {
        ArrayXd out(ax.n() - 1);
        for (Index i = 0; i + 1 < ax.n(); ++i)
            out(i) = (f.values(i + 1) - f.values(i)) / ax.dx_half(i);
        return out;
    }
    const Index ny = g.y().n();
    ArrayXd out((ax.n() - 1) * ny);
    for (Index fi = 0; fi + 1 < ax.n(); ++fi)
        for (Index j = 0; j < ny; ++j)
            out(fi * ny + j) =
                (f.values(g.index(fi + 1, j)) - f.values(g.index(fi, j))) / ax.dx_half(fi);
    return out;
}

ArrayXd face_differences_y(const Field& f) {
    const Grid& g = f.grid;
    if (g.dim() != 2)
        throw std::invalid_argument("face_differences_y: 1D grid");
    const Grid1D& ay = g.y();
    ArrayXd out(g.x().n() * (ay.n() - 1));
    for (Index i = 0; i < g.x().n(); ++i)
        for (Index fj = 0; fj + 1 < ay.n(); ++fj)
            out(i * (ay.n() - 1) + fj) =
                (f.values(g.index(i, fj + 1)) - f.values(g.index(i, fj))) / ay.dx_half(fj);
    return out;
}

double weighted_sum(const ArrayXd& values, const ArrayXd& weights) {
    double sum = 0, comp = 0;
    for (Index i = 0; i < values.size(); ++i) {
        const double term = values(i) * weights(i) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

double total_mass(const Field& f) {
    return weighted_sum(f.values, f.grid.volumes());
}

} // namespace crossfv
