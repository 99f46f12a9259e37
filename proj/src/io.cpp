#include "sparsegof/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsegof/error.hpp"

namespace sparsegof {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Splits one CSV line; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no, fields.size() + 1);
    fields.push_back(trim(field));
    return fields;
}

std::int64_t parse_count(const std::string& field, std::size_t line, std::size_t col,
                         const std::string& row_label, const std::string& col_label) {
    if (field.empty()) throw ParseError("empty cell", line, col);
    std::int64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("cell '" + field + "' is not an integer", line, col);
    }
    if (value < 0) {
        throw NegativeCount("negative count " + field + " in cell (" + row_label + ", " + col_label + ")",
                            line, col);
    }
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return in;
}

std::string csv_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string decision_string(Decision d) { return to_string(d); }

Decision decision_from(const std::string& s) {
    if (s == "reject") return Decision::reject;
    if (s == "accept") return Decision::accept;
    throw Error("unknown decision '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

ContingencyTable parse_table_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> col_labels;
    std::vector<std::string> row_labels;
    std::vector<std::int64_t> counts;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;

        auto fields = split_csv_line(line, line_no);
        if (!have_header) {
            const auto corner = lower(fields.front());
            if (!corner.empty() && corner != "rows") {
                throw ParseError("header must start with a blank field or 'rows'", line_no, 1);
            }
            if (fields.size() < 2) throw ParseError("header has no column labels", line_no, 2);
            col_labels.assign(fields.begin() + 1, fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() != col_labels.size() + 1) {
            throw RaggedRows("row has " + std::to_string(fields.size() - 1) + " values, header has " +
                                 std::to_string(col_labels.size()),
                             line_no, std::min(fields.size(), col_labels.size() + 1) + 1);
        }
        row_labels.push_back(fields.front());
        for (std::size_t j = 1; j < fields.size(); ++j) {
            counts.push_back(parse_count(fields[j], line_no, j + 1, fields.front(), col_labels[j - 1]));
        }
    }
    if (!have_header) throw ParseError("empty table file", line_no, 1);
    if (row_labels.empty()) throw ParseError("table has no data rows", line_no, 1);
    const auto rows = row_labels.size();
    const auto cols = col_labels.size();
    return ContingencyTable(rows, cols, std::move(counts), std::move(row_labels), std::move(col_labels));
}

ContingencyTable read_table_csv(const std::string& path) {
    auto in = open_input(path);
    return parse_table_csv(in);
}

void write_table_csv(std::ostream& out, const ContingencyTable& table) {
    out << "rows";
    for (const auto& c : table.col_labels()) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < table.rows(); ++i) {
        out << table.row_labels()[i];
        for (std::size_t j = 0; j < table.cols(); ++j) out << ',' << table.at(i, j);
        out << '\n';
    }
}

std::vector<double> parse_number_list(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream tokens(line);
        std::string tok;
        std::size_t col = 0;
        while (tokens >> tok) {
            ++col;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError("'" + tok + "' is not a number", line_no, col);
            }
            values.push_back(v);
        }
    }
    if (values.empty()) throw ParseError("no numbers found", line_no, 1);
    return values;
}

std::vector<double> read_number_file(const std::string& path) {
    auto in = open_input(path);
    return parse_number_list(in);
}

std::vector<std::int64_t> read_counts_file(const std::string& path) {
    const auto values = read_number_file(path);
    std::vector<std::int64_t> counts;
    counts.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v < 0.0) throw NegativeCount("negative count at position " + std::to_string(i + 1), 0, i + 1);
        if (v != std::floor(v)) throw ParseError("count at position " + std::to_string(i + 1) + " is not an integer", 0, i + 1);
        counts.push_back(static_cast<std::int64_t>(v));
    }
    return counts;
}

json to_json(const TestReport& r) {
    json stats = json::array();
    for (const auto& s : r.statistics) {
        stats.push_back({{"name", s.name},
                         {"value", s.value},
                         {"p_value", s.p_value},
                         {"decision", decision_string(s.decision)}});
    }
    json correction = {{"applicable", r.correction.has_value()},
                       {"skipped_reason", r.correction_skipped.empty() ? json(nullptr) : json(r.correction_skipped)}};
    if (r.correction) {
        const auto& p = *r.correction;
        correction.update({{"c", p.zeros}, {"b_min", p.b_min}, {"b", p.b}, {"a_min", p.a_min},
                           {"a_max", p.a_max}, {"a", p.a}, {"epsilon", p.epsilon}, {"h", p.h},
                           {"d", p.d}});
    }
    json layout = nullptr;
    if (!r.row_labels.empty()) {
        layout = {{"order", "row-major"}, {"rows", r.row_labels}, {"cols", r.col_labels}};
    }
    return json{{"schema_version", kSchemaVersion},
                {"kind", "test_report"},
                {"n", r.n},
                {"categories", r.categories},
                {"estimated_params", r.estimated_params},
                {"df", r.df},
                {"alpha", r.alpha},
                {"lambda", r.lambda},
                {"threshold", r.threshold},
                {"statistics", stats},
                {"combined_decision", decision_string(r.combined)},
                {"sparsity",
                 {{"zeros", r.zeros},
                  {"expected_below_0_5", r.sparsity.below_half},
                  {"expected_below_1", r.sparsity.below_one},
                  {"expected_below_5", r.sparsity.below_five}}},
                {"correction", correction},
                {"expected", r.expected},
                {"layout", layout}};
}

TestReport test_report_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw Error("unsupported schema_version");
    TestReport r;
    r.n = j.at("n").get<std::int64_t>();
    r.categories = j.at("categories").get<std::int64_t>();
    r.estimated_params = j.at("estimated_params").get<std::int64_t>();
    r.df = j.at("df").get<int>();
    r.alpha = j.at("alpha").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.threshold = j.at("threshold").get<double>();
    for (const auto& s : j.at("statistics")) {
        r.statistics.push_back({s.at("name").get<std::string>(), s.at("value").get<double>(),
                                s.at("p_value").get<double>(),
                                decision_from(s.at("decision").get<std::string>())});
    }
    r.combined = decision_from(j.at("combined_decision").get<std::string>());
    const auto& sp = j.at("sparsity");
    r.zeros = sp.at("zeros").get<std::int64_t>();
    r.sparsity = {sp.at("expected_below_0_5").get<std::int64_t>(), sp.at("expected_below_1").get<std::int64_t>(),
                  sp.at("expected_below_5").get<std::int64_t>()};
    const auto& c = j.at("correction");
    if (c.at("applicable").get<bool>()) {
        CorrectionParams p;
        p.zeros = c.at("c").get<std::int64_t>();
        p.b_min = c.at("b_min").get<double>();
        p.b = c.at("b").get<double>();
        p.a_min = c.at("a_min").get<double>();
        p.a_max = c.at("a_max").get<double>();
        p.a = c.at("a").get<double>();
        p.epsilon = c.at("epsilon").get<double>();
        p.h = c.at("h").get<double>();
        p.d = c.at("d").get<double>();
        r.correction = p;
    } else if (!c.at("skipped_reason").is_null()) {
        r.correction_skipped = c.at("skipped_reason").get<std::string>();
    }
    r.expected = j.at("expected").get<std::vector<double>>();
    if (const auto& layout = j.at("layout"); !layout.is_null()) {
        r.row_labels = layout.at("rows").get<std::vector<std::string>>();
        r.col_labels = layout.at("cols").get<std::vector<std::string>>();
    }
    return r;
}

void write_test_report_csv(std::ostream& out, const TestReport& r) {
    out << "statistic,value,threshold,p_value,decision\n";
    for (const auto& s : r.statistics) {
        out << s.name << ',' << format_double(s.value) << ',' << format_double(r.threshold) << ','
            << format_double(s.p_value) << ',' << to_string(s.decision) << '\n';
    }
    out << "combined,," << format_double(r.threshold) << ",," << to_string(r.combined) << '\n';
}

json to_json(const SimulationReport& r) {
    json rates = json::array();
    for (const auto& row : r.rejection_rates) {
        json by_stat = json::object();
        for (std::size_t s = 0; s < kSimStatistics.size(); ++s) by_stat[to_string(kSimStatistics[s])] = row.rate[s];
        rates.push_back({{"alpha", row.alpha}, {"threshold", row.threshold}, {"rates", by_stat}});
    }
    json quantiles = json::array();
    for (const auto& row : r.quantiles_by_c) {
        json q = json::object();
        for (std::size_t s = 0; s < kSimStatistics.size(); ++s) {
            q[to_string(kSimStatistics[s])] = row.quantile[s] ? json(*row.quantile[s]) : json(nullptr);
        }
        quantiles.push_back({{"c", row.zeros},
                             {"count", row.count},
                             {"corrected_count", row.corrected_count},
                             {"low_count", row.low_count},
                             {"q95", q}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"kind", "simulation_report"},
                {"categories", r.categories},
                {"n", r.n},
                {"reps", r.reps},
                {"seed", r.seed},
                {"df", r.df},
                {"threshold_line", r.threshold_line},
                {"mode_c", r.mode_c},
                {"excluded", {{"total", r.excluded},
                              {"uniform_nonzero", r.excluded_uniform},
                              {"empty_interval", r.excluded_empty_interval}}},
                {"rejection_rates", rates},
                {"quantiles_by_c", quantiles}};
}

void write_simulation_csv(std::ostream& out, const SimulationReport& r) {
    out << "alpha,threshold,mode_c,excluded";
    for (auto s : kSimStatistics) out << ',' << to_string(s);
    out << '\n';
    for (const auto& row : r.rejection_rates) {
        out << format_double(row.alpha) << ',' << format_double(row.threshold) << ',' << r.mode_c << ','
            << r.excluded;
        for (double v : row.rate) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_records_csv(std::ostream& out, const std::vector<ReplicateRecord>& records) {
    out << "replicate,c,Q,G,RC23,Qab,Gab,applicable\n";
    for (const auto& r : records) {
        out << r.replicate << ',' << r.zeros << ',' << format_double(r.q) << ',' << format_double(r.g) << ','
            << format_double(r.rc) << ',' << csv_number(r.q_ab) << ',' << csv_number(r.g_ab) << ','
            << (r.applicable() ? "true" : "false") << '\n';
    }
}

void write_quantiles_csv(std::ostream& out, const SimulationReport& r) {
    // Column order Q, Qab, G, Gab, RC23 maps to these statistic indices.
    constexpr std::array<std::size_t, 5> order = {0, 3, 1, 4, 2};
    out << "c,count,q95_Q,q95_Qab,q95_G,q95_Gab,q95_RC23,threshold\n";
    for (const auto& row : r.quantiles_by_c) {
        out << row.zeros << ',' << row.count;
        for (auto s : order) out << ',' << csv_number(row.quantile[s]);
        out << ',' << format_double(r.threshold_line) << '\n';
    }
}

}  // namespace sparsegof
