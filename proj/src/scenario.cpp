#include "aplab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"

namespace aplab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct ConfigLine {
    std::string key; // "section.key", or bare "key" before any section header
    std::string value;
    int line_no = 0;
};

[[noreturn]] void bad_line(const std::string& path, int line_no, const std::string& what) {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<ConfigLine> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario config: " + path);
    std::vector<ConfigLine> out;
    std::string section, line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') bad_line(path, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) bad_line(path, line_no, "empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad_line(path, line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad_line(path, line_no, "empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = trim(value.substr(1, value.size() - 2));
        out.push_back({section.empty() ? key : section + "." + key, value, line_no});
    }
    return out;
}

double to_double(const ConfigLine& l, const std::string& path) {
    std::size_t idx = 0;
    double v = 0.0;
    bool ok = true;
    try {
        v = std::stod(l.value, &idx);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || idx != l.value.size())
        bad_line(path, l.line_no, "expected a number for '" + l.key + "', got '" + l.value + "'");
    return v;
}

long to_long(const ConfigLine& l, const std::string& path) {
    std::size_t idx = 0;
    long v = 0;
    bool ok = true;
    try {
        v = std::stol(l.value, &idx);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || idx != l.value.size())
        bad_line(path, l.line_no, "expected an integer for '" + l.key + "', got '" + l.value + "'");
    return v;
}

int to_int(const ConfigLine& l, const std::string& path) {
    return static_cast<int>(to_long(l, path));
}

bool to_bool(const ConfigLine& l, const std::string& path) {
    if (l.value == "true" || l.value == "1") return true;
    if (l.value == "false" || l.value == "0") return false;
    bad_line(path, l.line_no, "expected true/false for '" + l.key + "', got '" + l.value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const std::size_t comma = value.find(',', pos);
        const std::size_t end = comma == std::string::npos ? value.size() : comma;
        const std::string item = trim(value.substr(pos, end - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> to_double_list(const ConfigLine& l, const std::string& path) {
    std::vector<double> out;
    for (const std::string& item : split_list(l.value)) {
        ConfigLine one{l.key, item, l.line_no};
        out.push_back(to_double(one, path));
    }
    if (out.empty()) bad_line(path, l.line_no, "'" + l.key + "' needs at least one value");
    return out;
}

std::string path_stem(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t start = slash == std::string::npos ? 0 : slash + 1;
    const std::size_t dot = path.find_last_of('.');
    const std::size_t end = (dot == std::string::npos || dot <= start) ? path.size() : dot;
    return path.substr(start, end - start);
}

} // namespace

Scenario load_scenario(const std::string& path) {
    Scenario s;
    for (const ConfigLine& l : read_config(path)) {
        const std::string& k = l.key;
        if (k == "name") s.name = l.value;
        else if (k == "dim") s.dim = to_int(l, path);
        else if (k == "gamma") s.gamma = to_double(l, path);
        else if (k == "lambda") s.lambda = to_double(l, path);
        else if (k == "seed") s.seed = static_cast<unsigned>(to_long(l, path));
        else if (k == "operator.kind") s.operator_kind = l.value;
        else if (k == "operator.theta") s.theta = to_double(l, path);
        else if (k == "operator.diag") s.diag = to_double_list(l, path);
        else if (k == "operator.rescale_r") s.rescale_r = to_double(l, path);
        else if (k == "domain.shape") s.shape = l.value;
        else if (k == "domain.resolution") s.resolution = to_int(l, path);
        else if (k == "domain.radius") s.radius = to_double(l, path);
        else if (k == "domain.length") s.length = to_double(l, path);
        else if (k == "domain.halfwidth") s.halfwidth = to_double(l, path);
        else if (k == "domain.height") s.height = to_double(l, path);
        else if (k == "boundary.generator") s.generator = l.value;
        else if (k == "boundary.scale") s.scale = to_double(l, path);
        else if (k == "boundary.offset") s.offset = to_double(l, path);
        else if (k == "boundary.aniso_c") s.aniso_c = to_double(l, path);
        else if (k == "boundary.ramp_lo") s.ramp_lo = to_double(l, path);
        else if (k == "boundary.ramp_hi") s.ramp_hi = to_double(l, path);
        else if (k == "solver.max_sweeps") s.solve.max_sweeps = to_long(l, path);
        else if (k == "solver.tol") s.solve.tol_residual = to_double(l, path);
        else if (k == "solver.damping") s.solve.damping = to_double(l, path);
        else if (k == "solver.positivity_floor") s.solve.positivity_floor = to_double(l, path);
        else if (k == "solver.newton_iters") s.solve.scalar_newton_iters = to_int(l, path);
        else if (k == "solver.over_relaxation") s.solve.over_relaxation = to_double(l, path);
        else if (k == "solver.inner_sweeps") s.solve.inner_sweeps = to_int(l, path);
        else if (k == "solver.track_energy") s.solve.track_energy = to_bool(l, path);
        else if (k == "analysis.weiss_radii") s.weiss_radii = to_double_list(l, path);
        else if (k == "analysis.growth_radii") s.growth_radii = to_double_list(l, path);
        else if (k == "analysis.growth_base") s.growth_base = l.value;
        else if (k == "analysis.blowup_radii") s.blowup_radii = to_double_list(l, path);
        else if (k == "analysis.contact_radii") s.contact_radii = to_double_list(l, path);
        else if (k == "analysis.directions") s.directions = split_list(l.value);
        else if (k == "analysis.monotonicity_radius") s.monotonicity_radius = to_double(l, path);
        else if (k == "analysis.nondeg_a_rel") s.nondeg_a_rel = to_double(l, path);
        else if (k == "analysis.transform_w") s.run_transform_w = to_bool(l, path);
        else if (k == "analysis.first_integral") s.run_first_integral = to_bool(l, path);
        else if (k == "analysis.gradient_at_origin") s.gradient_at_origin = to_bool(l, path);
        else bad_line(path, l.line_no, "unknown key '" + k + "'");
    }
    if (s.name.empty()) s.name = path_stem(path);
    return s;
}

OperatorSpec Scenario::make_operator() const {
    OperatorSpec spec = OperatorSpec::laplacian();
    if (operator_kind == "laplacian") {
        // keep the default
    } else if (operator_kind == "linear_trace") {
        if (diag.size() != static_cast<std::size_t>(dim))
            throw ConfigError("operator.diag needs exactly one entry per dimension");
        spec = OperatorSpec::linear_trace(SymMat::diag(dim, diag.data()));
    } else if (operator_kind == "perturbed_trace") {
        spec = OperatorSpec::perturbed_trace(theta);
    } else {
        throw ConfigError("unknown operator kind '" + operator_kind + "'");
    }
    if (rescale_r > 0.0) spec = rescaled_operator(spec, rescale_r, params());
    return spec;
}

GridPtr Scenario::make_grid() const {
    if (shape == "interval") return HalfGrid::interval(resolution, length);
    if (shape == "half_rectangle")
        return HalfGrid::half_rectangle(dim, resolution, halfwidth, height);
    if (shape == "half_disk") return HalfGrid::half_disk(dim, resolution, radius);
    throw ConfigError("unknown domain shape '" + shape + "'");
}

std::vector<double> Scenario::make_boundary_data(const GridPtr& grid) const {
    return boundary_data(grid, params(), generator, scale, offset, aniso_c, ramp_lo, ramp_hi);
}

Point parse_direction(const std::string& token, int dim) {
    std::string t = trim(token);
    double sign = 1.0;
    if (!t.empty() && t.front() == '-') {
        sign = -1.0;
        t = t.substr(1);
    }
    if (t.size() != 3 || t[0] != 'e' || t[1] != '_' || t[2] < '1' || t[2] > '3')
        throw ConfigError("bad direction token '" + token + "' (use e_1 .. e_3, optionally negated)");
    const int axis = t[2] - '1';
    if (axis >= dim)
        throw ConfigError("direction '" + token + "' exceeds the scenario dimension");
    if (axis == dim - 1 && sign < 0.0)
        throw ConfigError("direction '" + token + "' points below the fixed boundary");
    Point e{};
    e[static_cast<std::size_t>(axis)] = sign;
    return e;
}

std::vector<double> boundary_data(const GridPtr& grid, const ApParams& params,
                                  const std::string& generator, double scale,
                                  double offset, double aniso_c,
                                  double ramp_lo, double ramp_hi) {
    if (!(aniso_c > 0.0)) throw ParameterError("boundary_data: aniso_c must be positive");
    if (!(ramp_lo < ramp_hi))
        throw ParameterError("boundary_data: ramp_lo must be below ramp_hi");
    const int dim = grid->dim();
    std::vector<double> data(static_cast<std::size_t>(grid->num_nodes()), 0.0);
    for (long id = 0; id < grid->num_nodes(); ++id) {
        if (grid->node_class(id) != NodeClass::CurvedBoundary) continue;
        const Point p = grid->coord(id);
        const double xn = p[static_cast<std::size_t>(dim - 1)];
        double v = 0.0;
        if (generator == "zero") {
            v = 0.0;
        } else if (generator == "profile") {
            v = scale * profile_eval_aniso(params, xn, aniso_c);
        } else if (generator == "ramp_profile") {
            const double r = norm(p, dim);
            const double sin_t = r > 0.0 ? xn / r : 0.0;
            const double cos_t = r > 0.0 ? p[0] / r : 1.0;
            double ramp = 1.0;
            if (cos_t <= ramp_lo)
                ramp = 0.0;
            else if (cos_t < ramp_hi)
                ramp = (cos_t - ramp_lo) / (ramp_hi - ramp_lo);
            v = scale * profile_eval_aniso(params, sin_t, aniso_c) * ramp;
        } else {
            throw ConfigError("unknown boundary generator '" + generator + "'");
        }
        data[static_cast<std::size_t>(id)] = v + offset;
    }
    return data;
}

void validate_scenario(const Scenario& s) {
    if (s.name.empty()) throw ConfigError("scenario has no name");
    if (s.name.find('/') != std::string::npos || s.name.find('\\') != std::string::npos)
        throw ConfigError("scenario name must not contain path separators");
    if (s.dim < 1 || s.dim > 3) throw ConfigError("dim must be 1, 2, or 3");
    if (s.shape == "interval") {
        if (s.dim != 1) throw ConfigError("interval domains are one-dimensional");
        if (!(s.length > 0.0)) throw ConfigError("domain.length must be positive");
    } else if (s.shape == "half_rectangle") {
        if (s.dim < 2) throw ConfigError("half_rectangle needs dim 2 or 3");
        if (!(s.halfwidth > 0.0) || !(s.height > 0.0))
            throw ConfigError("domain.halfwidth and domain.height must be positive");
    } else if (s.shape == "half_disk") {
        if (s.dim < 2) throw ConfigError("half_disk needs dim 2 or 3");
        if (!(s.radius > 0.0)) throw ConfigError("domain.radius must be positive");
    } else {
        throw ConfigError("unknown domain shape '" + s.shape + "'");
    }
    if (s.resolution < 32) throw ConfigError("domain.resolution must be at least 32 cells");
    if (s.shape != "interval" && s.resolution % 2 != 0)
        throw ConfigError("half_rectangle / half_disk resolutions must be even");

    (void)s.params();        // gamma in (1,2), lambda >= 1
    (void)s.make_operator(); // kind, theta, diag, rescale_r

    double bound = 0.0;
    if (s.shape == "interval")
        bound = s.length;
    else if (s.shape == "half_disk")
        bound = s.radius;
    else
        bound = std::min(s.halfwidth, s.height);
    const auto check_radii = [&](const std::vector<double>& radii, const char* what) {
        for (double r : radii) {
            if (!(r > 0.0))
                throw ConfigError(std::string(what) + " radii must be positive");
            if (r > bound * (1.0 + 1e-12))
                throw ConfigError(std::string(what) + " radius " + std::to_string(r) +
                                  " leaves the domain");
        }
    };
    check_radii(s.weiss_radii, "analysis.weiss");
    check_radii(s.growth_radii, "analysis.growth");
    check_radii(s.blowup_radii, "analysis.blowup");
    check_radii(s.contact_radii, "analysis.contact");
    if (s.monotonicity_radius < 0.0)
        throw ConfigError("analysis.monotonicity_radius must be nonnegative");
    if (s.nondeg_a_rel < 0.0) throw ConfigError("analysis.nondeg_a_rel must be nonnegative");
    if (s.growth_base != "origin" && s.growth_base != "nearest_fb")
        throw ConfigError("analysis.growth_base must be 'origin' or 'nearest_fb'");
    for (const std::string& t : s.directions) (void)parse_direction(t, s.dim);

    if (s.generator != "zero" && s.generator != "profile" && s.generator != "ramp_profile")
        throw ConfigError("unknown boundary generator '" + s.generator + "'");
    if (!(s.scale >= 0.0)) throw ConfigError("boundary.scale must be nonnegative");
    if (!(s.offset >= 0.0)) throw ConfigError("boundary.offset must be nonnegative");
    if (!(s.aniso_c > 0.0)) throw ConfigError("boundary.aniso_c must be positive");
    if (!(s.ramp_lo >= -1.0 && s.ramp_hi <= 1.0 && s.ramp_lo < s.ramp_hi))
        throw ConfigError("boundary ramp bounds must satisfy -1 <= ramp_lo < ramp_hi <= 1");

    if (s.solve.max_sweeps < 1) throw ConfigError("solver.max_sweeps must be positive");
    if (!(s.solve.tol_residual > 0.0)) throw ConfigError("solver.tol must be positive");
    if (!(s.solve.damping > 0.0 && s.solve.damping <= 1.0))
        throw ConfigError("solver.damping must lie in (0, 1]");
}

} // namespace aplab
