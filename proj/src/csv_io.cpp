#include "esgrisk/csv_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "esgrisk/errors.hpp"

namespace esgrisk {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    const std::string t = trim(s);
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw InputError(where + ": cannot parse number '" + s + "'");
    return v;
}

struct Panel {
    std::vector<std::string> dates;
    std::vector<std::string> tickers;
    std::vector<std::vector<double>> columns; // [asset][t]
};

void check_month_start(const std::string& date, const std::string& where) {
    // ISO yyyy-mm-dd, day 01.
    const bool shape = date.size() == 10 && date[4] == '-' && date[7] == '-';
    bool digits = shape;
    if (shape)
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
            digits = digits && std::isdigit(static_cast<unsigned char>(date[i]));
    if (!digits) throw InputError(where + ": date '" + date + "' is not ISO yyyy-mm-dd");
    if (date.substr(8) != "01")
        throw InputError(where + ": date '" + date + "' is not a month start");
    const int month = std::stoi(date.substr(5, 2));
    if (month < 1 || month > 12) throw InputError(where + ": date '" + date + "' has month " +
                                                  std::to_string(month));
}

Panel read_panel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    Panel p;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (row == 1) {
            if (fields.size() < 2 || fields[0] != "date")
                throw InputError(path + " row 1: header must be 'date,TICKER1,...'");
            p.tickers.assign(fields.begin() + 1, fields.end());
            p.columns.resize(p.tickers.size());
            continue;
        }
        if (fields.size() != p.tickers.size() + 1)
            throw InputError(path + " row " + std::to_string(row) + ": expected " +
                             std::to_string(p.tickers.size() + 1) + " columns, got " +
                             std::to_string(fields.size()));
        const std::string where_date = path + " row " + std::to_string(row) + " column 1";
        check_month_start(fields[0], where_date);
        if (!p.dates.empty()) {
            const std::string& prev = p.dates.back();
            const int prev_key = std::stoi(prev.substr(0, 4)) * 12 + std::stoi(prev.substr(5, 2));
            const int cur_key =
                std::stoi(fields[0].substr(0, 4)) * 12 + std::stoi(fields[0].substr(5, 2));
            if (cur_key != prev_key + 1)
                throw InputError(where_date + ": months must be consecutive and ascending");
        }
        p.dates.push_back(fields[0]);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const std::string where = path + " row " + std::to_string(row) + " column " +
                                      std::to_string(c + 1);
            p.columns[c - 1].push_back(parse_double(fields[c], where));
        }
    }
    if (p.dates.empty()) throw InputError(path + ": no data rows");
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    return out;
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

HistoricalSeries read_series_csvs(const std::string& prices_path,
                                  const std::string& ratings_path) {
    const Panel prices = read_panel(prices_path);
    const Panel ratings = read_panel(ratings_path);
    if (prices.tickers != ratings.tickers)
        throw InputError(ratings_path + ": tickers differ from " + prices_path);
    if (prices.dates != ratings.dates)
        throw InputError(ratings_path + ": dates differ from " + prices_path);
    HistoricalSeries h;
    h.dates = prices.dates;
    h.tickers = prices.tickers;
    h.prices = prices.columns;
    h.ratings_raw = ratings.columns;
    h.validate();
    return h;
}

void write_series_csv(const std::string& path, const std::vector<std::string>& dates,
                      const std::vector<std::string>& tickers,
                      const std::vector<std::vector<double>>& columns) {
    auto out = open_out(path);
    out << "date";
    for (const auto& t : tickers) out << ',' << t;
    out << '\n';
    for (std::size_t t = 0; t < dates.size(); ++t) {
        out << dates[t];
        for (const auto& col : columns) out << ',' << format_double(col[t]);
        out << '\n';
    }
}

void write_dynamics_csv(const std::string& path, const std::vector<std::string>& tickers,
                        const std::vector<AssetDynamics>& dynamics) {
    if (tickers.size() != dynamics.size())
        throw InputError("write_dynamics_csv: tickers/dynamics size mismatch");
    auto out = open_out(path);
    out << "asset,mu_x,sigma_x,mu_s,sigma_s,rho,p,s0_rescaled\n";
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        const auto& d = dynamics[i];
        out << tickers[i] << ',' << format_double(d.mu_x) << ',' << format_double(d.sigma_x)
            << ',' << format_double(d.mu_s) << ',' << format_double(d.sigma_s) << ','
            << format_double(d.rho) << ',' << format_double(d.p) << ','
            << format_double(d.s0_rescaled) << '\n';
    }
}

std::vector<std::pair<std::string, AssetDynamics>> read_dynamics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    std::string line;
    std::vector<std::pair<std::string, AssetDynamics>> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (row == 1) {
            if (fields != std::vector<std::string>{"asset", "mu_x", "sigma_x", "mu_s", "sigma_s",
                                                   "rho", "p", "s0_rescaled"})
                throw InputError(path + " row 1: unexpected dynamics header");
            continue;
        }
        if (fields.size() != 8)
            throw InputError(path + " row " + std::to_string(row) + ": expected 8 columns");
        const std::string where = path + " row " + std::to_string(row);
        AssetDynamics d;
        d.mu_x = parse_double(fields[1], where);
        d.sigma_x = parse_double(fields[2], where);
        d.mu_s = parse_double(fields[3], where);
        d.sigma_s = parse_double(fields[4], where);
        d.rho = parse_double(fields[5], where);
        d.p = parse_double(fields[6], where);
        d.s0_rescaled = parse_double(fields[7], where);
        d.notional = 1.0;
        try {
            d.validate();
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        out.emplace_back(fields[0], d);
    }
    if (out.empty()) throw InputError(path + ": no dynamics rows");
    return out;
}

void write_scenarios_csv(const std::string& path, const ScenarioSet& scen,
                         const std::vector<std::string>& tickers) {
    if (tickers.size() != scen.n_assets())
        throw InputError("write_scenarios_csv: ticker count mismatch");
    auto out = open_out(path);
    out << "sample,asset,x,s_norm\n";
    for (std::size_t i = 0; i < scen.n_samples(); ++i)
        for (std::size_t j = 0; j < scen.n_assets(); ++j)
            out << i << ',' << tickers[j] << ',' << format_double(scen.x(i, j)) << ','
                << format_double(scen.s_norm(i, j)) << '\n';
}

void write_risk_table_csv(const std::string& path, const std::vector<RiskTableRow>& rows) {
    auto out = open_out(path);
    out << "asset,rho_financial,rho_esg,premium,esg_rating_now\n";
    for (const auto& r : rows)
        out << r.asset << ',' << format_double(r.rho_financial) << ','
            << format_double(r.rho_esg) << ',' << format_double(r.premium) << ','
            << format_double(r.esg_rating_now) << '\n';
}

void write_shift_curve_csv(const std::string& path, const ShiftCurve& curve) {
    auto out = open_out(path);
    out << "shift,rho,marginal_rho\n";
    for (std::size_t i = 0; i < curve.shift.size(); ++i)
        out << format_double(curve.shift[i]) << ',' << format_double(curve.rho[i]) << ','
            << format_double(curve.marginal_rho[i]) << '\n';
}

void write_ledger_csv(const std::string& path, const BacktestLedger& ledger) {
    auto out = open_out(path);
    out << "date,strategy,cum_log_return,portfolio_esg_rating\n";
    for (const auto& r : ledger.rows)
        out << r.date << ',' << r.strategy << ',' << format_double(r.cum_log_return) << ','
            << format_double(r.esg_rating) << '\n';
}

void write_backtest_weights_csv(const std::string& path, const BacktestLedger& ledger,
                                const std::vector<std::string>& tickers) {
    auto out = open_out(path);
    out << "date,strategy,asset,weight\n";
    for (const auto& r : ledger.rows) {
        if (r.weights.size() != tickers.size())
            throw InputError("write_backtest_weights_csv: ticker count mismatch");
        for (std::size_t j = 0; j < tickers.size(); ++j)
            out << r.date << ',' << r.strategy << ',' << tickers[j] << ','
                << format_double(r.weights[j]) << '\n';
    }
}

void write_category_csv(const std::string& path,
                        const std::vector<std::pair<std::string, CategoryBreakdown>>& rows) {
    auto out = open_out(path);
    out << "strategy,category,weight\n";
    for (const auto& [strategy, breakdown] : rows)
        for (std::size_t b = 0; b < breakdown.names.size(); ++b)
            out << strategy << ',' << breakdown.names[b] << ','
                << format_double(breakdown.weight[b]) << '\n';
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> vals;
        vals.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            vals.push_back(parse_double(fields[c], path + " row " + std::to_string(row) +
                                                       " column " + std::to_string(c + 1)));
        if (!rows.empty() && vals.size() != rows.front().size())
            throw InputError(path + " row " + std::to_string(row) + ": ragged matrix");
        rows.push_back(std::move(vals));
    }
    if (rows.empty() || rows.size() != rows.front().size())
        throw InputError(path + ": expected a square numeric matrix");
    Eigen::MatrixXd m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

} // namespace esgrisk
