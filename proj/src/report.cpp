#include "catelasso/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "catelasso/io.hpp"

namespace catelasso::report {
namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return io::format_double(v);
}

// Fixed-precision formatting for SVG coordinates.
std::string px(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string xml_escape(const std::string& in) {
    std::string out;
    for (char c : in) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

struct Box {
    double q1, median, q3, whisker_lo, whisker_hi;
    std::vector<double> outliers;
};

Box box_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    Box b{};
    b.q1 = bench::quantile_sorted(v, 0.25);
    b.median = bench::quantile_sorted(v, 0.5);
    b.q3 = bench::quantile_sorted(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.q1;
    b.whisker_hi = b.q3;
    for (double x : v) {
        if (x < lo_fence || x > hi_fence) {
            b.outliers.push_back(x);
        } else {
            b.whisker_lo = std::min(b.whisker_lo, x);
            b.whisker_hi = std::max(b.whisker_hi, x);
        }
    }
    return b;
}

}  // namespace

std::string to_csv(const bench::RunResult& result, bool timing) {
    std::string out = "replication,method,rmse,lambda,converged,wall_ms\n";
    for (const auto& r : result.records) {
        out += std::to_string(r.replication);
        out += ',';
        out += to_string(r.method);
        out += ',';
        out += num(r.rmse);
        out += ',';
        out += num(r.lambda);
        out += r.converged ? ",true," : ",false,";
        out += timing ? num(r.wall_ms) : "0";
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json to_json(const bench::RunResult& result, bool timing) {
    nlohmann::ordered_json j;
    j["name"] = result.name;
    j["methods"] = nlohmann::ordered_json::array();
    for (auto m : result.methods) j["methods"].push_back(std::string(to_string(m)));
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : result.records) {
        nlohmann::ordered_json rec;
        rec["replication"] = r.replication;
        rec["method"] = std::string(to_string(r.method));
        rec["rmse"] = json_number(r.rmse);
        rec["lambda"] = json_number(r.lambda);
        rec["converged"] = r.converged;
        rec["wall_ms"] = timing ? r.wall_ms : 0.0;
        if (!r.error.empty()) rec["error"] = r.error;
        j["records"].push_back(std::move(rec));
    }
    j["aggregates"] = nlohmann::ordered_json::object();
    for (auto m : result.methods) {
        const auto& a = result.aggregates.at(m);
        nlohmann::ordered_json agg;
        agg["count"] = a.count;
        agg["mean"] = json_number(a.mean);
        agg["median"] = json_number(a.median);
        agg["q1"] = json_number(a.q1);
        agg["q3"] = json_number(a.q3);
        agg["min"] = json_number(a.min);
        agg["max"] = json_number(a.max);
        j["aggregates"][std::string(to_string(m))] = std::move(agg);
    }
    return j;
}

std::string to_svg_boxplot(const bench::RunResult& result) {
    constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50, kPlotH = 320, kSlot = 110;
    const double width = kLeft + kRight + kSlot * static_cast<double>(std::max<std::size_t>(1, result.methods.size()));
    const double height = kTop + kPlotH + kBottom;

    std::vector<std::pair<Method, Box>> boxes;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto m : result.methods) {
        auto v = result.rmse_of(m);
        std::erase_if(v, [](double x) { return !std::isfinite(x); });
        if (v.empty()) continue;
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        lo = std::min(lo, *mn);
        hi = std::max(hi, *mx);
        boxes.emplace_back(m, box_of(std::move(v)));
    }
    if (boxes.empty()) {
        lo = 0.0;
        hi = 1.0;
    }

    const bool log_axis = lo > 0.0 && hi / lo > 100.0;
    auto tf = [&](double v) { return log_axis ? std::log10(v) : v; };
    double a = tf(lo), b = tf(hi);
    if (b - a < 1e-12 * std::max(1.0, std::abs(a))) {
        a -= 0.5 * std::max(1.0, std::abs(a)) * 0.1;
        b += 0.5 * std::max(1.0, std::abs(b)) * 0.1;
    }
    const double pad = 0.05 * (b - a);
    a -= pad;
    b += pad;
    if (!log_axis && lo >= 0.0) a = std::max(a, 0.0);
    auto ypos = [&](double v) { return kTop + kPlotH * (1.0 - (tf(v) - a) / (b - a)); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << px(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << xml_escape(result.name) << "</text>\n";
    s << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(kLeft) << "\" y2=\""
      << px(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
    s << "<text transform=\"translate(16," << px(kTop + kPlotH / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << (log_axis ? "RMSE (log scale)" : "RMSE") << "</text>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double t = a + (b - a) * i / kTicks;
        const double v = log_axis ? std::pow(10.0, t) : t;
        const double y = ypos(v);
        s << "<line x1=\"" << px(kLeft - 4) << "\" y1=\"" << px(y) << "\" x2=\"" << px(width - kRight)
          << "\" y2=\"" << px(y) << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\">"
          << tick_label(v) << "</text>\n";
    }

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& [m, bx] = boxes[i];
        const double cx = kLeft + kSlot * (static_cast<double>(i) + 0.5);
        const double half = kSlot * 0.3;
        s << "<g class=\"box\" data-method=\"" << to_string(m) << "\">\n";
        s << "<line x1=\"" << px(cx) << "\" y1=\"" << px(ypos(bx.whisker_lo)) << "\" x2=\"" << px(cx)
          << "\" y2=\"" << px(ypos(bx.q1)) << "\" stroke=\"black\"/>\n";
        s << "<line x1=\"" << px(cx) << "\" y1=\"" << px(ypos(bx.q3)) << "\" x2=\"" << px(cx)
          << "\" y2=\"" << px(ypos(bx.whisker_hi)) << "\" stroke=\"black\"/>\n";
        for (double w : {bx.whisker_lo, bx.whisker_hi}) {
            s << "<line x1=\"" << px(cx - half / 2) << "\" y1=\"" << px(ypos(w)) << "\" x2=\""
              << px(cx + half / 2) << "\" y2=\"" << px(ypos(w)) << "\" stroke=\"black\"/>\n";
        }
        s << "<rect x=\"" << px(cx - half) << "\" y=\"" << px(ypos(bx.q3)) << "\" width=\"" << px(2 * half)
          << "\" height=\"" << px(ypos(bx.q1) - ypos(bx.q3)) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        s << "<line x1=\"" << px(cx - half) << "\" y1=\"" << px(ypos(bx.median)) << "\" x2=\""
          << px(cx + half) << "\" y2=\"" << px(ypos(bx.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (double o : bx.outliers) {
            s << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(ypos(o))
              << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
        }
        s << "<text x=\"" << px(cx) << "\" y=\"" << px(kTop + kPlotH + 20) << "\" text-anchor=\"middle\">"
          << to_string(m) << "</text>\n";
        s << "</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::vector<std::string> emit_report(const bench::RunResult& result, const bench::OutputSpec& out) {
    if (result.records.empty()) throw Error(ErrorKind::InvalidInput, "report: result has no records");
    const std::filesystem::path dir(out.dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());

    std::vector<std::string> written;
    auto put = [&](const char* ext, const std::string& text) {
        const auto path = dir / (out.prefix + ext);
        write_file(path, text);
        written.push_back(path.string());
    };
    if (out.csv) put(".csv", to_csv(result, out.timing));
    if (out.json) put(".json", to_json(result, out.timing).dump(2) + "\n");
    if (out.svg) put(".svg", to_svg_boxplot(result));
    return written;
}

}  // namespace catelasso::report
