#include "ballquad/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ballquad/errors.hpp"

namespace ballquad {

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t j = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > j) {
            out.push_back(line.substr(j, i - j));
        }
    }
    return out;
}

std::uint64_t parse_count(std::string_view s)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw IoError("not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return f;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open " + path.string());
    }
    return f;
}

void check_written(std::ostream& out)
{
    if (!out) {
        throw IoError("write failed");
    }
}

std::string where(std::size_t lineno)
{
    return "line " + std::to_string(lineno) + ": ";
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        throw IoError("cannot format value");
    }
    return std::string(buf, p);
}

double parse_double(std::string_view s)
{
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw IoError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

void write_nodes(std::ostream& out, const NodeSet& nodes)
{
    out << "# rho " << format_double(nodes.ball.radius) << '\n';
    out << "# center " << format_double(nodes.ball.center.x) << ' ' << format_double(nodes.ball.center.y) << ' '
        << format_double(nodes.ball.center.z) << '\n';
    out << "# h " << format_double(nodes.h) << '\n';
    if (nodes.domain == DomainKind::convex_hull) {
        out << "# domain convex_hull\n";
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Point3& p = nodes.points[i];
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << ' '
            << (nodes.on_surface[i] ? 1 : 0) << '\n';
    }
    check_written(out);
}

NodeSet read_nodes(std::istream& in)
{
    NodeSet nodes;
    bool have_rho = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split(line);
        if (tok.empty()) {
            continue;
        }
        try {
            if (tok[0] == "#") {
                if (tok.size() == 3 && tok[1] == "rho") {
                    nodes.ball.radius = parse_double(tok[2]);
                    have_rho = true;
                } else if (tok.size() == 5 && tok[1] == "center") {
                    nodes.ball.center = {parse_double(tok[2]), parse_double(tok[3]), parse_double(tok[4])};
                } else if (tok.size() == 3 && tok[1] == "h") {
                    nodes.h = parse_double(tok[2]);
                } else if (tok.size() == 3 && tok[1] == "domain") {
                    if (tok[2] == "convex_hull") {
                        nodes.domain = DomainKind::convex_hull;
                    } else if (tok[2] != "ball") {
                        throw IoError("unknown domain '" + std::string(tok[2]) + "'");
                    }
                }
                continue;
            }
            if (tok.size() != 4 || (tok[3] != "0" && tok[3] != "1")) {
                throw IoError("expected 'x y z s' with s in {0,1}");
            }
            nodes.push_back({parse_double(tok[0]), parse_double(tok[1]), parse_double(tok[2])}, tok[3] == "1");
        } catch (const IoError& e) {
            throw IoError(where(lineno) + e.what());
        }
    }
    if (in.bad()) {
        throw IoError("read failed");
    }
    if (!have_rho && nodes.domain == DomainKind::ball) {
        throw IoError("node file has no '# rho' header");
    }
    return nodes;
}

void write_nodes(const std::filesystem::path& path, const NodeSet& nodes)
{
    auto f = open_out(path);
    write_nodes(f, nodes);
}

NodeSet read_nodes(const std::filesystem::path& path)
{
    auto f = open_in(path);
    return read_nodes(f);
}

void write_weights(std::ostream& out, const QuadratureRule& rule)
{
    const Ball& b = rule.nodes.ball;
    out << "# N " << rule.W.size() << " rho " << format_double(b.radius) << " center " << format_double(b.center.x)
        << ' ' << format_double(b.center.y) << ' ' << format_double(b.center.z) << '\n';
    for (std::size_t i = 0; i < rule.W.size(); ++i) {
        const Point3& p = rule.nodes.points[i];
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << ' '
            << format_double(rule.W[i]) << '\n';
    }
    check_written(out);
}

WeightsFile read_weights(std::istream& in)
{
    WeightsFile wf;
    std::uint64_t expected = 0;
    bool have_header = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split(line);
        if (tok.empty()) {
            continue;
        }
        try {
            if (tok[0] == "#") {
                if (tok.size() == 9 && tok[1] == "N" && tok[3] == "rho" && tok[5] == "center") {
                    expected = parse_count(tok[2]);
                    wf.ball.radius = parse_double(tok[4]);
                    wf.ball.center = {parse_double(tok[6]), parse_double(tok[7]), parse_double(tok[8])};
                    have_header = true;
                }
                continue;
            }
            if (tok.size() != 4) {
                throw IoError("expected 'x y z W'");
            }
            wf.points.push_back({parse_double(tok[0]), parse_double(tok[1]), parse_double(tok[2])});
            wf.W.push_back(parse_double(tok[3]));
        } catch (const IoError& e) {
            throw IoError(where(lineno) + e.what());
        }
    }
    if (in.bad()) {
        throw IoError("read failed");
    }
    if (!have_header) {
        throw IoError("weights file has no '# N ... rho ... center ...' header");
    }
    if (wf.W.size() != expected) {
        throw IoError("weights file header says N = " + std::to_string(expected) + " but has " +
                      std::to_string(wf.W.size()) + " rows");
    }
    return wf;
}

void write_weights(const std::filesystem::path& path, const QuadratureRule& rule)
{
    auto f = open_out(path);
    write_weights(f, rule);
}

WeightsFile read_weights(const std::filesystem::path& path)
{
    auto f = open_in(path);
    return read_weights(f);
}

void write_tessellation(std::ostream& out, const Tessellation& tess)
{
    for (const auto& t : tess.tets) {
        out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
    }
    out << "# boundary\n";
    for (const auto& bf : tess.boundary_faces) {
        out << bf.tet << ' ' << bf.face[0] << ' ' << bf.face[1] << ' ' << bf.face[2] << '\n';
    }
    check_written(out);
}

Tessellation read_tessellation(std::istream& in)
{
    Tessellation tess;
    bool boundary = false;
    std::string line;
    std::size_t lineno = 0;
    auto u32 = [](std::string_view s) {
        const auto v = parse_count(s);
        if (v > 0xffffffffULL) {
            throw IoError("index out of range");
        }
        return static_cast<std::uint32_t>(v);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split(line);
        if (tok.empty()) {
            continue;
        }
        try {
            if (tok[0] == "#") {
                if (tok.size() == 2 && tok[1] == "boundary") {
                    boundary = true;
                }
                continue;
            }
            if (tok.size() != 4) {
                throw IoError("expected four indices");
            }
            if (boundary) {
                const auto k = u32(tok[0]);
                if (k >= tess.tets.size()) {
                    throw IoError("boundary face refers to missing tet " + std::to_string(k));
                }
                tess.boundary_faces.push_back({k, {u32(tok[1]), u32(tok[2]), u32(tok[3])}});
            } else {
                tess.tets.push_back({u32(tok[0]), u32(tok[1]), u32(tok[2]), u32(tok[3])});
            }
        } catch (const IoError& e) {
            throw IoError(where(lineno) + e.what());
        }
    }
    std::stable_sort(tess.boundary_faces.begin(), tess.boundary_faces.end(),
                     [](const BoundaryFace& a, const BoundaryFace& b) { return a.tet < b.tet; });
    return tess;
}

std::vector<double> read_samples(std::istream& in)
{
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = split(line);
        if (tok.empty() || tok[0].front() == '#') {
            continue;
        }
        if (tok.size() != 1) {
            throw IoError(where(lineno) + "expected one value per line");
        }
        try {
            out.push_back(parse_double(tok[0]));
        } catch (const IoError& e) {
            throw IoError(where(lineno) + e.what());
        }
    }
    return out;
}

std::vector<double> read_samples(const std::filesystem::path& path)
{
    auto f = open_in(path);
    return read_samples(f);
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows)
{
    out << "N,error,seconds\n";
    for (const auto& r : rows) {
        out << r.N << ',' << format_double(r.error) << ',' << format_double(r.seconds) << '\n';
    }
    check_written(out);
}

} // namespace ballquad
