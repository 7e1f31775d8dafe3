#include "cuspflow/io.hpp"

#include "cuspflow/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace cuspflow {

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

void write_snapshots_csv(const std::string& path, const LagrangianGrid& grid,
                         const std::vector<Snapshot>& snapshots) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << "t,x,phi,Phi\n";
    std::string line;
    for (const auto& s : snapshots) {
        const std::string ts = format_double(s.t);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            line.clear();
            line += ts;
            line += ',';
            line += format_double(grid.x[i]);
            line += ',';
            line += format_double(s.phi[i]);
            line += ',';
            line += format_double(s.Phi[i]);
            line += '\n';
            out << line;
        }
    }
}

void write_theta_csv(const std::string& path, const std::vector<EulerianProfile>& profiles) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << "t,y,theta\n";
    std::string line;
    for (const auto& p : profiles) {
        const std::string ts = format_double(p.t);
        for (std::size_t i = 0; i < p.y.size(); ++i) {
            line.clear();
            line += ts;
            line += ',';
            line += format_double(p.y[i]);
            line += ',';
            line += format_double(p.theta[i]);
            line += '\n';
            out << line;
        }
    }
}

namespace {

double parse_field(const std::string& line, std::size_t& pos, const std::string& path) {
    const std::size_t next = line.find(',', pos);
    const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
    pos = next == std::string::npos ? line.size() : next + 1;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw config_error(path + ": malformed numeric field");
    return v;
}

} // namespace

SnapshotFile read_snapshots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,x,phi,Phi") {
        throw config_error(path + ": expected header t,x,phi,Phi");
    }
    SnapshotFile f;
    Snapshot cur;
    bool have_cur = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        const double t = parse_field(line, pos, path);
        const double x = parse_field(line, pos, path);
        const double phi = parse_field(line, pos, path);
        const double Phi = parse_field(line, pos, path);
        if (!have_cur || t != cur.t) {
            if (have_cur) f.snapshots.push_back(std::move(cur));
            cur = Snapshot{t, {}, {}};
            have_cur = true;
        }
        if (f.snapshots.empty()) f.x.push_back(x);
        cur.phi.push_back(phi);
        cur.Phi.push_back(Phi);
    }
    if (have_cur) f.snapshots.push_back(std::move(cur));
    if (f.snapshots.empty()) throw config_error(path + ": no snapshot rows");
    for (const auto& s : f.snapshots) {
        if (s.phi.size() != f.x.size()) {
            throw config_error(path + ": inconsistent node count across snapshots");
        }
    }
    return f;
}

} // namespace cuspflow
