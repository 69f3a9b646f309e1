#include "causalreg/dataset_io.hpp"

#include "causalreg/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace causalreg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    std::string out = s.substr(b, e - b + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> line_numbers;
};

RawTable read_table(const std::string& text) {
    RawTable t;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        std::vector<std::string> cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(t.header.size()),
                             lineno, static_cast<long>(std::min(cells.size(), t.header.size())) + 1);
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(lineno);
    }
    if (t.header.empty()) throw ParseError("empty CSV input");
    return t;
}

} // namespace

Dataset parse_dataset_text(const std::string& text, const std::string& response,
                           const std::vector<std::string>& anchors) {
    const RawTable t = read_table(text);
    const Index n = static_cast<Index>(t.rows.size());
    if (n < 2) throw ParseError("dataset needs at least two data rows", n == 0 ? -1 : t.line_numbers[0]);

    auto find = [&](const std::string& name) -> long {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        return it == t.header.end() ? -1 : static_cast<long>(it - t.header.begin());
    };
    long y_col = -1;
    if (!response.empty()) {
        y_col = find(response);
        if (y_col < 0) throw ConfigError("response column '" + response + "' not found");
    }
    std::vector<long> a_cols;
    for (const std::string& a : anchors) {
        const long c = find(a);
        if (c < 0) throw ConfigError("anchor column '" + a + "' not found");
        if (c == y_col) throw ConfigError("column '" + a + "' is both response and anchor");
        if (std::find(a_cols.begin(), a_cols.end(), c) != a_cols.end()) {
            throw ConfigError("anchor column '" + a + "' listed twice");
        }
        a_cols.push_back(c);
    }

    auto numeric_column = [&](long c) {
        Vector v(n);
        for (Index i = 0; i < n; ++i) {
            const std::string& cell = t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (!parse_number(cell, v(i))) {
                throw ParseError("non-numeric or missing value '" + cell + "' in column '" +
                                     t.header[static_cast<std::size_t>(c)] + "'",
                                 t.line_numbers[static_cast<std::size_t>(i)], c + 1);
            }
        }
        return v;
    };

    Dataset d;
    std::vector<long> x_cols;
    for (long c = 0; c < static_cast<long>(t.header.size()); ++c) {
        if (c == y_col || std::find(a_cols.begin(), a_cols.end(), c) != a_cols.end()) continue;
        x_cols.push_back(c);
    }
    d.X.resize(n, static_cast<Index>(x_cols.size()));
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
        d.X.col(static_cast<Index>(k)) = numeric_column(x_cols[k]);
        d.x_names.push_back(t.header[static_cast<std::size_t>(x_cols[k])]);
    }
    if (y_col >= 0) d.Y = numeric_column(y_col);

    std::vector<Vector> a_columns;
    for (long c : a_cols) {
        bool numeric = true;
        double tmp = 0.0;
        for (Index i = 0; i < n && numeric; ++i) {
            const std::string& cell = t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            if (cell.empty()) {
                throw ParseError("missing value in anchor column '" +
                                     t.header[static_cast<std::size_t>(c)] + "'",
                                 t.line_numbers[static_cast<std::size_t>(i)], c + 1);
            }
            numeric = parse_number(cell, tmp);
        }
        const std::string& name = t.header[static_cast<std::size_t>(c)];
        if (numeric) {
            a_columns.push_back(numeric_column(c));
            d.a_names.push_back(name);
            continue;
        }
        std::map<std::string, Index> levels;
        for (Index i = 0; i < n; ++i) levels[t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]] = 0;
        Index next = 0;
        for (auto& [level, idx] : levels) {
            idx = next++;
            d.a_names.push_back(name + "=" + level);
        }
        std::vector<Vector> dummies(levels.size(), Vector::Zero(n));
        for (Index i = 0; i < n; ++i) {
            const Index lvl = levels[t.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]];
            dummies[static_cast<std::size_t>(lvl)](i) = 1.0;
        }
        for (Vector& v : dummies) a_columns.push_back(std::move(v));
    }
    d.A.resize(n, static_cast<Index>(a_columns.size()));
    for (std::size_t k = 0; k < a_columns.size(); ++k) d.A.col(static_cast<Index>(k)) = a_columns[k];
    return d;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Dataset parse_dataset(const std::string& path, const std::string& response,
                      const std::vector<std::string>& anchors) {
    return parse_dataset_text(read_text_file(path), response, anchors);
}

std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string dataset_to_csv(const Dataset& d, const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const std::string& c : comments) out << "# " << c << "\n";
    const bool has_y = d.Y.size() == d.n();
    std::vector<std::string> names;
    if (has_y) names.push_back("y");
    for (Index j = 0; j < d.p(); ++j) {
        names.push_back(j < static_cast<Index>(d.x_names.size()) ? d.x_names[static_cast<std::size_t>(j)]
                                                                  : "x" + std::to_string(j + 1));
    }
    for (Index k = 0; k < d.A.cols(); ++k) {
        names.push_back(k < static_cast<Index>(d.a_names.size()) ? d.a_names[static_cast<std::size_t>(k)]
                                                                  : "a" + std::to_string(k + 1));
    }
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << "\n";
    for (Index i = 0; i < d.n(); ++i) {
        bool first = true;
        auto put = [&](double v) {
            out << (first ? "" : ",") << format_double(v);
            first = false;
        };
        if (has_y) put(d.Y(i));
        for (Index j = 0; j < d.p(); ++j) put(d.X(i, j));
        for (Index k = 0; k < d.A.cols(); ++k) put(d.A(i, k));
        out << "\n";
    }
    return out.str();
}

} // namespace causalreg
