#include "outputs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pmo/errors.hpp"
#include "pmo/patterns.hpp"

namespace pmo::cli {

std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

namespace {

void write_row(std::ostream& os, const Sample& s, const char* block) {
    os << fmt(s.time) << ',' << fmt(s.v_in) << ',' << fmt(s.v_device) << ',' << fmt(s.current) << ','
       << fmt(s.temperature) << ',' << fmt(s.v_a) << ',' << block << ',' << (s.spike ? 1 : 0) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << kTraceHeader << '\n';
    std::size_t i = 0, r = 0;
    while (i < trace.integration.size() || r < trace.refractory.size()) {
        const bool take_input =
            r >= trace.refractory.size() ||
            (i < trace.integration.size() && trace.integration[i].time <= trace.refractory[r].time);
        if (take_input) write_row(os, trace.integration[i++], block_name(Block::integration));
        else write_row(os, trace.refractory[r++], block_name(Block::refractory));
    }
}

void write_spike_csv(std::ostream& os, const Trace& trace) {
    os << kSpikeHeader << '\n';
    for (const auto& e : trace.events) {
        os << fmt(e.time) << ',' << block_name(e.source) << ',' << e.register1 << '\n';
    }
}

void write_replication_csv(std::ostream& os, const ReplicationResult& r) {
    os << kTraceHeader << '\n';
    for (const auto& s : r.samples) write_row(os, s, "device");
}

RunSummary summarize(const std::vector<double>& integration, const std::vector<double>& refractory) {
    RunSummary s;
    s.spike_count = integration.size();
    s.refractory_spike_count = refractory.size();
    for (std::size_t k = 1; k < integration.size(); ++k) {
        s.isi.push_back(integration[k] - integration[k - 1]);
    }
    if (integration.size() >= 2) {
        s.mean_frequency =
            static_cast<double>(integration.size() - 1) / (integration.back() - integration.front());
    }
    if (integration.size() >= 6) s.pattern = pattern_name(classify_pattern(integration, 0.25, 0.0));
    return s;
}

RunSummary summarize(const Trace& trace) {
    return summarize(trace.spike_times(Block::integration), trace.spike_times(Block::refractory));
}

RunSummary summarize_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader) {
        throw ConfigError("trace CSV line 1: expected header " + std::string(kTraceHeader));
    }
    std::vector<double> integration, refractory;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) {
            throw ConfigError("trace CSV line " + std::to_string(line_no) + ": expected 8 columns");
        }
        if (cells[7] != "1") continue;
        double t = 0.0;
        const char* end = cells[0].data() + cells[0].size();
        const auto r = std::from_chars(cells[0].data(), end, t);
        if (r.ec != std::errc{} || r.ptr != end) {
            throw ConfigError("trace CSV line " + std::to_string(line_no) + ": bad time_s");
        }
        if (cells[6] == "refractory") refractory.push_back(t);
        else integration.push_back(t);
    }
    return summarize(integration, refractory);
}

void write_summary_json(std::ostream& os, const RunSummary& s, const std::string& scenario) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["spike_count"] = s.spike_count;
    j["refractory_spike_count"] = s.refractory_spike_count;
    j["mean_frequency_hz"] = s.mean_frequency;
    j["pattern"] = s.pattern;
    j["isi_s"] = s.isi;
    os << j.dump(2) << '\n';
}

void write_trace_svg(std::ostream& os, const Trace& trace, const std::string& title) {
    constexpr double width = 900, panel = 220, left = 70, top = 40, gap = 50, right = 20;
    const double plot_w = width - left - right;
    const double height = top + 2 * panel + gap + 40;
    double t_max = 0.0, i_max = 0.0, temp_min = 1e300, temp_max = 0.0;
    for (const auto* rows : {&trace.integration, &trace.refractory}) {
        for (const auto& s : *rows) {
            t_max = std::max(t_max, s.time);
            i_max = std::max(i_max, s.current);
            temp_min = std::min(temp_min, s.temperature);
            temp_max = std::max(temp_max, s.temperature);
        }
    }
    if (t_max <= 0.0) t_max = 1.0;
    if (i_max <= 0.0) i_max = 1.0;
    if (!(temp_max > temp_min)) temp_max = temp_min + 1.0;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";

    auto panel_frame = [&](double y0, const std::string& label, double lo, double hi) {
        os << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\"" << panel
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        os << "<text x=\"5\" y=\"" << y0 + panel / 2 << "\">" << label << "</text>\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", hi);
        os << "<text x=\"" << left - 5 << "\" y=\"" << y0 + 10 << "\" text-anchor=\"end\">" << buf << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.4g", lo);
        os << "<text x=\"" << left - 5 << "\" y=\"" << y0 + panel << "\" text-anchor=\"end\">" << buf << "</text>\n";
    };
    auto polyline = [&](const std::vector<Sample>& rows, double y0, double lo, double hi, bool current,
                        const char* colour) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
        for (const auto& s : rows) {
            const double v = current ? s.current : s.temperature;
            const double x = left + plot_w * s.time / t_max;
            const double y = y0 + panel * (1.0 - (v - lo) / (hi - lo));
            os << x << ',' << y << ' ';
        }
        os << "\"/>\n";
    };

    const double y_current = top;
    const double y_temp = top + panel + gap;
    panel_frame(y_current, "I [mA]", 0.0, i_max * 1e3);
    panel_frame(y_temp, "T [K]", temp_min, temp_max);
    polyline(trace.integration, y_current, 0.0, i_max, true, "#1f77b4");
    polyline(trace.refractory, y_current, 0.0, i_max, true, "#d62728");
    polyline(trace.integration, y_temp, temp_min, temp_max, false, "#1f77b4");
    polyline(trace.refractory, y_temp, temp_min, temp_max, false, "#d62728");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g us", t_max * 1e6);
    os << "<text x=\"" << left + plot_w << "\" y=\"" << height - 10 << "\" text-anchor=\"end\">" << buf
       << "</text>\n"
       << "<text x=\"" << left << "\" y=\"" << height - 10
       << "\"><tspan fill=\"#1f77b4\">integration</tspan> <tspan fill=\"#d62728\">refractory</tspan></text>\n"
       << "</svg>\n";
}

}  // namespace pmo::cli
