#include "ciblp/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#ifndef CIBLP_VERSION_STRING
#define CIBLP_VERSION_STRING "v0.0.0-unknown"
#endif

namespace ciblp {

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6e", x);
    return buf;
}

}  // namespace

std::string ser_sweep_csv(const std::vector<SerCell>& cells) {
    std::string out = "scheme,snr_db,symbols,errors,ser,mean_solve_ms\n";
    for (const SerCell& c : cells) {
        out += precoder_name(c.scheme);
        out += ',' + fmt_real(c.snr_db);
        out += ',' + std::to_string(c.symbols);
        out += ',' + std::to_string(c.errors);
        out += ',' + fmt_real(c.ser);
        out += ',' + fmt_real(c.mean_solve_ms);
        out += '\n';
    }
    return out;
}

std::string block_sweep_csv(const std::vector<BlockSweepCell>& cells) {
    std::string out = "scheme,n_block,snr_db,symbols,errors,ser\n";
    for (const BlockSweepCell& c : cells) {
        out += precoder_name(c.scheme);
        out += ',' + std::to_string(c.n_block);
        out += ',' + fmt_real(c.snr_db);
        out += ',' + std::to_string(c.symbols);
        out += ',' + std::to_string(c.errors);
        out += ',' + fmt_real(c.ser);
        out += '\n';
    }
    return out;
}

std::string timing_csv(const std::vector<TimingCell>& cells) {
    std::string out = "k,n_t,n_block,scheme,mean_solve_ms,std_solve_ms\n";
    for (const TimingCell& c : cells) {
        out += std::to_string(c.k);
        out += ',' + std::to_string(c.n_t);
        out += ',' + std::to_string(c.n_block);
        out += ',' + precoder_name(c.scheme);
        out += ',' + fmt_real(c.mean_solve_ms);
        out += ',' + fmt_real(c.std_solve_ms);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CiError("cannot write file '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CiError("cannot read file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable parse_csv(const std::string& content) {
    CsvTable table;
    std::stringstream ss(content);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (first) {
            table.header = fields;
            first = false;
        } else {
            table.rows.push_back(fields);
        }
    }
    return table;
}

namespace {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;  // x, y
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

// log10-y line plot; y <= 0 points are dropped from the polyline (they
// stay in the CSV, which remains the source of truth).
std::string render_svg(const std::vector<Series>& series, const std::string& x_label,
                       const std::string& y_label, bool log_y) {
    const double width = 640, height = 480;
    const double ml = 70, mr = 20, mt = 20, mb = 50;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
        for (auto [x, y] : s.pts) {
            if (log_y && y <= 0.0) continue;
            const double yy = log_y ? std::log10(y) : y;
            xmin = std::min(xmin, x), xmax = std::max(xmax, x);
            ymin = std::min(ymin, yy), ymax = std::max(ymax, yy);
        }
    }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (ymin > ymax) ymin = log_y ? -1 : 0, ymax = log_y ? 0 : 1;
    if (xmax - xmin < 1e-12) xmax = xmin + 1;
    if (ymax - ymin < 1e-12) ymax = ymin + 1;

    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    };
    auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // frame and gridlines
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
        << width - ml - mr << "\" height=\"" << height - mt - mb
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int n_ticks = 6;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / n_ticks;
        const double fy = ymin + (ymax - ymin) * i / n_ticks;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << mt << "\" x2=\"" << px(fx)
            << "\" y2=\"" << height - mb << "\" stroke=\"#dddddd\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\""
            << width - mr << "\" y2=\"" << py(fy) << "\" stroke=\"#dddddd\"/>\n";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", fx);
        svg << "<text x=\"" << px(fx) << "\" y=\"" << height - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << buf << "</text>\n";
        if (log_y)
            std::snprintf(buf, sizeof(buf), "1e%.2g", fy);
        else
            std::snprintf(buf, sizeof(buf), "%.3g", fy);
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = kColors[si % 6];
        std::ostringstream poly;
        for (auto [x, y] : series[si].pts) {
            if (log_y && y <= 0.0) continue;
            poly << px(x) << ',' << py(log_y ? std::log10(y) : y) << ' ';
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << poly.str() << "\"/>\n";
        for (auto [x, y] : series[si].pts) {
            if (log_y && y <= 0.0) continue;
            svg << "<circle cx=\"" << px(x) << "\" cy=\""
                << py(log_y ? std::log10(y) : y) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        svg << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 + 16 * si
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">"
            << series[si].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

int column_index(const CsvTable& t, const std::string& name) {
    for (size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return static_cast<int>(i);
    throw CiError("CSV is missing column '" + name + "'");
}

std::vector<Series> series_from_csv(const CsvTable& t, const std::string& key_col,
                                    const std::string& x_col,
                                    const std::string& y_col) {
    const int kc = column_index(t, key_col);
    const int xc = column_index(t, x_col);
    const int yc = column_index(t, y_col);
    std::vector<Series> series;
    for (const auto& row : t.rows) {
        const std::string& key = row[static_cast<size_t>(kc)];
        Series* s = nullptr;
        for (Series& cand : series)
            if (cand.label == key) s = &cand;
        if (!s) {
            series.push_back({key, {}});
            s = &series.back();
        }
        s->pts.emplace_back(std::stod(row[static_cast<size_t>(xc)]),
                            std::stod(row[static_cast<size_t>(yc)]));
    }
    return series;
}

}  // namespace

void svg_from_ser_csv(const std::string& csv_path, const std::string& svg_path) {
    const CsvTable t = parse_csv(read_text_file(csv_path));
    write_text_file(svg_path, render_svg(series_from_csv(t, "scheme", "snr_db", "ser"),
                                         "SNR (dB)", "SER", true));
}

void svg_from_block_csv(const std::string& csv_path, const std::string& svg_path) {
    const CsvTable t = parse_csv(read_text_file(csv_path));
    write_text_file(svg_path,
                    render_svg(series_from_csv(t, "scheme", "n_block", "ser"),
                               "block length N", "SER", true));
}

void svg_from_timing_csv(const std::string& csv_path, const std::string& svg_path) {
    const CsvTable t = parse_csv(read_text_file(csv_path));
    write_text_file(
        svg_path,
        render_svg(series_from_csv(t, "scheme", "n_block", "mean_solve_ms"),
                   "block length N", "QP time per block (ms)", true));
}

std::string version_string() { return CIBLP_VERSION_STRING; }

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["config"] = m.config_echo;
    j["solver_failures"] = m.failures_per_scheme;
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& dir) {
    write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                    manifest_json(m));
}

}  // namespace ciblp
