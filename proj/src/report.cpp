#include "pzshell/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pzshell::cli {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

const char* kSweepHeader =
    "eps,mode,xi_eps,xi_limit,xi_gap,h1_error_disp,l2_error_phi,l2_error_dphi3,overlap,flagged";

}  // namespace

std::string sweep_csv(const ConvergenceTable& table) {
    std::ostringstream os;
    os << kSweepHeader << "\n";
    for (const auto& r : table.rows) {
        os << format_double(r.eps) << ',' << r.mode << ',' << format_double(r.xi_eps) << ','
           << format_double(r.xi_limit) << ',' << format_double(r.xi_gap) << ','
           << format_double(r.h1_error_disp) << ',' << format_double(r.l2_error_phi) << ','
           << format_double(r.l2_error_dphi3) << ',' << format_double(r.overlap) << ','
           << (r.flagged ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string sweep_json(const ConvergenceTable& table) {
    // hand-written so the numbers carry the same 17-significant-digit text as
    // the CSV mirror
    std::ostringstream os;
    os << "[\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        os << "  {\"eps\": " << format_double(r.eps) << ", \"mode\": " << r.mode
           << ", \"xi_eps\": " << format_double(r.xi_eps)
           << ", \"xi_limit\": " << format_double(r.xi_limit)
           << ", \"xi_gap\": " << format_double(r.xi_gap)
           << ", \"h1_error_disp\": " << format_double(r.h1_error_disp)
           << ", \"l2_error_phi\": " << format_double(r.l2_error_phi)
           << ", \"l2_error_dphi3\": " << format_double(r.l2_error_dphi3)
           << ", \"overlap\": " << format_double(r.overlap)
           << ", \"flagged\": " << (r.flagged ? "true" : "false") << "}"
           << (i + 1 < table.rows.size() ? ",\n" : "\n");
    }
    os << "]\n";
    return os.str();
}

ConvergenceTable parse_sweep_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kSweepHeader)
        throw std::runtime_error("parse_sweep_csv: unexpected header");
    ConvergenceTable t;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        SweepRow r;
        int flagged = 0;
        std::istringstream ls(line);
        std::string tok;
        auto next = [&]() {
            if (!std::getline(ls, tok, ',')) throw std::runtime_error("parse_sweep_csv: short row");
            return tok;
        };
        r.eps = std::stod(next());
        r.mode = std::stoi(next());
        r.xi_eps = std::stod(next());
        r.xi_limit = std::stod(next());
        r.xi_gap = std::stod(next());
        r.h1_error_disp = std::stod(next());
        r.l2_error_phi = std::stod(next());
        r.l2_error_dphi3 = std::stod(next());
        r.overlap = std::stod(next());
        flagged = std::stoi(next());
        r.flagged = flagged != 0;
        t.rows.push_back(r);
    }
    return t;
}

std::string slopes_json(const std::vector<SlopeEntry>& entries) {
    std::ostringstream os;
    os << "[\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        os << "  {\"mode\": " << e.mode << ", \"quantity\": \"" << e.quantity
           << "\", \"slope\": " << format_double(e.slope)
           << ", \"r_squared\": " << format_double(e.r_squared)
           << ", \"monotone\": " << (e.monotone ? "true" : "false") << "}"
           << (i + 1 < entries.size() ? ",\n" : "\n");
    }
    os << "]\n";
    return os.str();
}

std::string limit_eigs_csv(const std::vector<LimitEigRow>& rows) {
    std::ostringstream os;
    os << "mode,xi,xi_bulk\n";
    for (const auto& r : rows)
        os << r.mode << ',' << format_double(r.xi) << ',' << format_double(r.xi_bulk) << "\n";
    return os.str();
}

std::vector<LimitEigRow> parse_limit_eigs_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "mode,xi,xi_bulk")
        throw std::runtime_error("parse_limit_eigs_csv: unexpected header");
    std::vector<LimitEigRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        LimitEigRow r;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        r.mode = std::stoi(tok);
        std::getline(ls, tok, ',');
        r.xi = std::stod(tok);
        std::getline(ls, tok, ',');
        r.xi_bulk = std::stod(tok);
        rows.push_back(r);
    }
    return rows;
}

std::string validate_json(const std::vector<CheckResult>& checks) {
    bool all = true;
    std::ostringstream os;
    os << "{\n  \"checks\": [\n";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        os << "    {\"name\": \"" << c.name << "\", \"passed\": "
           << (c.passed ? "true" : "false") << ", \"value\": " << format_double(c.value)
           << ", \"bound\": " << format_double(c.bound) << ", \"detail\": \"" << c.detail
           << "\"}" << (i + 1 < checks.size() ? ",\n" : "\n");
        all = all && c.passed;
    }
    os << "  ],\n  \"all_passed\": " << (all ? "true" : "false") << "\n}\n";
    return os.str();
}

std::string long_format_csv(const ConvergenceTable& table) {
    std::ostringstream os;
    os << "quantity,eps,mode,value\n";
    auto put = [&os](const char* q, double eps, int mode, double v) {
        os << q << ',' << format_double(eps) << ',' << mode << ',' << format_double(v) << "\n";
    };
    for (const auto& r : table.rows) {
        put("xi_eps", r.eps, r.mode, r.xi_eps);
        put("xi_gap", r.eps, r.mode, r.xi_gap);
        put("h1_error_disp", r.eps, r.mode, r.h1_error_disp);
        put("l2_error_phi", r.eps, r.mode, r.l2_error_phi);
        put("l2_error_dphi3", r.eps, r.mode, r.l2_error_dphi3);
    }
    return os.str();
}

std::string matrix_market(const eig::SparseMat& m) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << "\n";
    for (int k = 0; k < m.outerSize(); ++k)
        for (eig::SparseMat::InnerIterator it(m, k); it; ++it)
            os << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << format_double(it.value())
               << "\n";
    return os.str();
}

std::string matrix_market(const eig::Matrix& m) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix array real general\n";
    os << m.rows() << ' ' << m.cols() << "\n";
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) os << format_double(m(i, j)) << "\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace pzshell::cli
