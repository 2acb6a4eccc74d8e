#include "chj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "chj/text.hpp"

namespace chj {

TorusSpec::TorusSpec(int dim, int resolution, double period)
    : TorusSpec(dim, {resolution, dim == 2 ? resolution : 1}, {period, dim == 2 ? period : 1.0}) {}

TorusSpec::TorusSpec(int dim, std::array<int, kMaxDim> resolution, Vec period)
    : dim_(dim), resolution_(resolution), period_(period) {
    if (dim != 1 && dim != 2) throw InvalidArgument("torus dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (resolution_[a] < 8) throw InvalidArgument("torus resolution must be at least 8 per axis");
        if (!(period_[a] > 0.0) || !std::isfinite(period_[a]))
            throw InvalidArgument("torus period must be positive");
    }
    if (dim == 1) {
        resolution_[1] = 1;
        period_[1] = 1.0;
    }
}

double TorusSpec::max_spacing() const {
    double h = spacing(0);
    if (dim_ == 2) h = std::max(h, spacing(1));
    return h;
}

std::size_t TorusSpec::node_count() const {
    return static_cast<std::size_t>(resolution_[0]) * static_cast<std::size_t>(resolution_[1]);
}

std::array<int, kMaxDim> TorusSpec::multi_index(std::size_t flat) const {
    const auto n0 = static_cast<std::size_t>(resolution_[0]);
    return {static_cast<int>(flat % n0), static_cast<int>(flat / n0)};
}

Vec TorusSpec::node_point(std::size_t flat) const {
    const auto m = multi_index(flat);
    Vec x{};
    for (int a = 0; a < dim_; ++a) x[a] = m[a] * spacing(a);
    return x;
}

Vec TorusSpec::wrap(const Vec& x) const {
    Vec r{};
    for (int a = 0; a < dim_; ++a) r[a] = wrap_coordinate(x[a], period_[a]);
    return r;
}

double wrap_coordinate(double x, double period) {
    double r = x - period * std::floor(x / period);
    if (r >= period) r -= period;
    if (r < 0.0) r = 0.0;
    return r;
}

double wrap_displacement(double a, double b, double period) {
    const double d = b - a;
    return d - period * std::floor((d + 0.5 * period) / period);
}

Vec wrap_displacement(const Vec& a, const Vec& b, const TorusSpec& spec) {
    Vec d{};
    for (int k = 0; k < spec.dim(); ++k)
        d[k] = wrap_displacement(wrap_coordinate(a[k], spec.period(k)), wrap_coordinate(b[k], spec.period(k)),
                                 spec.period(k));
    return d;
}

GridFunction::GridFunction(TorusSpec spec, double fill) : spec_(spec), values_(spec.node_count(), fill) {}

GridFunction::GridFunction(TorusSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.node_count())
        throw InvalidArgument("grid function length " + std::to_string(values_.size()) + " does not match " +
                              std::to_string(spec_.node_count()) + " nodes");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("grid function values must be finite");
}

GridFunction GridFunction::sample(const TorusSpec& spec, const std::function<double(const Vec&)>& fn) {
    std::vector<double> v(spec.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.node_point(i));
    return GridFunction(spec, std::move(v));
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

struct CellCoord {
    int lo;
    int hi;
    double theta;
};

CellCoord locate(double x, double period, int n) {
    double s = x * (n / period);
    if (s < 0.0 || s >= n) s = wrap_coordinate(x, period) / (period / n);
    const double nearest = std::floor(s + 0.5);
    if (std::abs(s - nearest) < 1e-12 * n) s = nearest;
    int i = static_cast<int>(s);
    const double theta = s - i;
    if (i >= n) i -= n;
    return {i, i + 1 == n ? 0 : i + 1, theta};
}

}  // namespace

InterpolatedValue interpolate_with_gradient(const GridFunction& f, const Vec& x) {
    const TorusSpec& spec = f.spec();
    const CellCoord c0 = locate(x[0], spec.period(0), spec.resolution(0));
    if (spec.dim() == 1) {
        const double a = f[c0.lo];
        const double b = f[c0.hi];
        if (c0.theta == 0.0) return {a, {(b - a) / spec.spacing(0), 0.0}};
        return {a + c0.theta * (b - a), {(b - a) / spec.spacing(0), 0.0}};
    }
    const CellCoord c1 = locate(x[1], spec.period(1), spec.resolution(1));
    const double f00 = f[spec.flat_index({c0.lo, c1.lo})];
    const double f10 = f[spec.flat_index({c0.hi, c1.lo})];
    const double f01 = f[spec.flat_index({c0.lo, c1.hi})];
    const double f11 = f[spec.flat_index({c0.hi, c1.hi})];
    const double t0 = c0.theta;
    const double t1 = c1.theta;
    double value;
    if (t0 == 0.0 && t1 == 0.0) {
        value = f00;
    } else {
        value = (1 - t0) * (1 - t1) * f00 + t0 * (1 - t1) * f10 + (1 - t0) * t1 * f01 + t0 * t1 * f11;
    }
    const double g0 = ((1 - t1) * (f10 - f00) + t1 * (f11 - f01)) / spec.spacing(0);
    const double g1 = ((1 - t0) * (f01 - f00) + t0 * (f11 - f10)) / spec.spacing(1);
    return {value, {g0, g1}};
}

double interpolate(const GridFunction& f, const Vec& x) { return interpolate_with_gradient(f, x).value; }

OneSidedGradient difference_quotients(const GridFunction& f, std::size_t node) {
    const TorusSpec& spec = f.spec();
    const auto m = spec.multi_index(node);
    const double here = f[node];
    OneSidedGradient g;
    for (int a = 0; a < spec.dim(); ++a) {
        const int n = spec.resolution(a);
        auto prev = m;
        auto next = m;
        prev[a] = (m[a] + n - 1) % n;
        next[a] = (m[a] + 1) % n;
        const double h = spec.spacing(a);
        g.lower[a] = (here - f[spec.flat_index(prev)]) / h;
        g.upper[a] = (f[spec.flat_index(next)] - here) / h;
    }
    return g;
}

void write_grid_function(std::ostream& os, const GridFunction& f) {
    const TorusSpec& s = f.spec();
    const bool iso = s.dim() == 1 || (s.period(0) == s.period(1) && s.resolution(0) == s.resolution(1));
    os << "torus d=" << s.dim() << " period=" << format_double(s.period(0));
    if (!iso) os << ',' << format_double(s.period(1));
    os << " n=" << s.resolution(0);
    if (!iso) os << ',' << s.resolution(1);
    os << '\n';
    for (double v : f.values()) os << format_double(v) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

GridFunction read_grid_function(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw InvalidArgument("grid function file is empty");
    std::istringstream hs(header);
    std::string word;
    hs >> word;
    if (word != "torus") throw InvalidArgument("grid function header must start with 'torus'");
    int dim = 0;
    std::vector<std::string> periods, ns;
    while (hs >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw InvalidArgument("malformed header field '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string val = word.substr(eq + 1);
        if (key == "d")
            dim = static_cast<int>(parse_double(val));
        else if (key == "period")
            periods = split(val, ',');
        else if (key == "n")
            ns = split(val, ',');
        else
            throw InvalidArgument("unknown header field '" + key + "'");
    }
    if (dim != 1 && dim != 2) throw InvalidArgument("header must declare d=1 or d=2");
    if (periods.empty() || ns.empty()) throw InvalidArgument("header must declare period and n");
    auto axis = [&](const std::vector<std::string>& v, int a) { return v[std::min<std::size_t>(a, v.size() - 1)]; };
    std::array<int, kMaxDim> res{static_cast<int>(parse_double(axis(ns, 0))), 1};
    Vec per{parse_double(axis(periods, 0)), 1.0};
    if (dim == 2) {
        res[1] = static_cast<int>(parse_double(axis(ns, 1)));
        per[1] = parse_double(axis(periods, 1));
    }
    TorusSpec spec(dim, res, per);
    std::vector<double> values;
    values.reserve(spec.node_count());
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        values.push_back(parse_double(line));
    }
    return GridFunction(spec, std::move(values));
}

void save_grid_function(const std::string& path, const GridFunction& f) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_grid_function(os, f);
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_grid_function(is);
}

}  // namespace chj
