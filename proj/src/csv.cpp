#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "mamix/study.hpp"

namespace mamix {

namespace {

std::vector<std::string> row_fields(const StudyRow& r)
{
    return {fmt::format("{:.17g}", r.h),           fmt::format("{}", r.nx),
            fmt::format("{:.17g}", r.epsilon),     fmt::format("{:.17g}", r.err_u_l2),
            fmt::format("{:.17g}", r.err_u_h1),    fmt::format("{:.17g}", r.err_sigma_l2),
            fmt::format("{:.17g}", r.err_sigma_h1), fmt::format("{}", r.newton_iters),
            fmt::format("{:.17g}", r.wall_ms)};
}

void write_joined(std::ostream& out, const std::vector<std::string>& fields, char sep)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << sep;
        out << fields[i];
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, int line)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw InvalidInput(fmt::format("csv line {}: bad number '{}'", line, s));
    return v;
}

}  // namespace

void write_csv(std::ostream& out, const StudyTable& t)
{
    write_joined(out, csv_columns(), ',');
    for (const StudyRow& r : t.rows) write_joined(out, row_fields(r), ',');
}

void write_dat(std::ostream& out, const StudyTable& t)
{
    for (const StudyRow& r : t.rows) write_joined(out, row_fields(r), ' ');
}

void emit_csv(const StudyTable& t, const std::filesystem::path& path)
{
    std::filesystem::path dat = path;
    dat.replace_extension(".dat");
    for (const auto& [target, writer] : {std::pair{path, &write_csv}, std::pair{dat, &write_dat}}) {
        std::ofstream out(target);
        if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", target.string()));
        writer(out, t);
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", target.string()));
    }
}

StudyTable read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("csv: missing header");
    if (split(line, ',') != csv_columns()) throw InvalidInput(fmt::format("csv: unexpected header '{}'", line));
    StudyTable t;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != csv_columns().size()) {
            throw InvalidInput(fmt::format("csv line {}: {} columns, expected {}", lineno, f.size(),
                                           csv_columns().size()));
        }
        StudyRow r;
        r.h = parse_double(f[0], lineno);
        r.nx = static_cast<int>(parse_double(f[1], lineno));
        r.epsilon = parse_double(f[2], lineno);
        r.err_u_l2 = parse_double(f[3], lineno);
        r.err_u_h1 = parse_double(f[4], lineno);
        r.err_sigma_l2 = parse_double(f[5], lineno);
        r.err_sigma_h1 = parse_double(f[6], lineno);
        r.newton_iters = static_cast<int>(parse_double(f[7], lineno));
        r.wall_ms = parse_double(f[8], lineno);
        t.rows.push_back(r);
    }
    return t;
}

StudyTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot open '{}'", path.string()));
    return read_csv(in);
}

}  // namespace mamix
