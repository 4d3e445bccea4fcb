#include "polarsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "polarsim/errors.hpp"

namespace polarsim {

namespace fs = std::filesystem;

std::string decimal(const Rational& value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.4f", value.to_double());
  return buffer;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

void write_file(const fs::path& path, const std::string& content, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  written.push_back(path);
}

std::string signed_decimal(const Rational& r) {
  std::string s = decimal(r);
  return r.num() > 0 ? "+" + s : s;
}

double quantile(std::vector<int> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

std::string format_delta_table(const StudySummary& summary) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "party" << std::setw(16) << "target" << std::setw(8) << "kind" << std::right
      << std::setw(6) << "n" << std::setw(10) << "median" << std::setw(10) << "mean"
      << "  out_group\n";
  for (const auto& row : summary.deltas) {
    out << std::left << std::setw(16) << row.party << std::setw(16) << row.target.str() << std::setw(8)
        << to_string(row.kind) << std::right << std::setw(6) << row.aggregate.n << std::setw(10)
        << signed_decimal(row.aggregate.median) << std::setw(10) << signed_decimal(row.aggregate.mean) << "  "
        << (row.out_group ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string render_out_group_chart(const std::vector<AgentDelta>& rows, AffectKind kind) {
  std::map<std::string, std::vector<int>> by_party;
  for (const auto& r : rows)
    if (r.kind == kind && r.party != kUnaffiliated && r.party != r.target.str()) by_party[r.party].push_back(r.delta);
  if (by_party.empty()) return {};

  int lo = 0;
  int hi = 0;
  for (const auto& [party, values] : by_party)
    for (int v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (lo == hi) hi = lo + 1;

  const double width = 160.0 * static_cast<double>(by_party.size()) + 80.0;
  const double height = 360.0;
  const double top = 40.0;
  const double bottom = height - 40.0;
  auto y = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(1);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">Change in out-group " << to_string(kind)
      << " by party</text>\n";
  svg << "<line x1=\"60\" y1=\"" << y(0) << "\" x2=\"" << width - 10 << "\" y2=\"" << y(0)
      << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<text x=\"55\" y=\"" << y(hi) + 4 << "\" text-anchor=\"end\">" << hi << "</text>\n";
  svg << "<text x=\"55\" y=\"" << y(lo) + 4 << "\" text-anchor=\"end\">" << lo << "</text>\n";
  svg << "<text x=\"55\" y=\"" << y(0) + 4 << "\" text-anchor=\"end\">0</text>\n";

  double x = 140.0;
  for (const auto& [party, values] : by_party) {
    const double q1 = quantile(values, 0.25);
    const double med = quantile(values, 0.5);
    const double q3 = quantile(values, 0.75);
    svg << "<rect x=\"" << x - 40 << "\" y=\"" << y(q3) << "\" width=\"80\" height=\"" << std::max(1.0, y(q1) - y(q3))
        << "\" fill=\"#dde6f0\" stroke=\"#345\"/>\n";
    svg << "<line x1=\"" << x - 40 << "\" y1=\"" << y(med) << "\" x2=\"" << x + 40 << "\" y2=\"" << y(med)
        << "\" stroke=\"#345\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double jitter = (static_cast<double>(i % 9) - 4.0) * 7.0;
      svg << "<circle cx=\"" << x + jitter << "\" cy=\"" << y(values[i]) << "\" r=\"3\" fill=\"#c33\" fill-opacity=\"0.6\"/>\n";
    }
    svg << "<text x=\"" << x << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << party << " (n="
        << values.size() << ")</text>\n";
    x += 160.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<fs::path> write_report(const StudySummary& summary, const fs::path& dir, bool charts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create report directory " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;

  std::ostringstream deltas;
  deltas << "party,target,kind,out_group,n,median,median_exact,mean,mean_exact\n";
  for (const auto& r : summary.deltas)
    deltas << csv_field(r.party) << ',' << csv_field(r.target.str()) << ',' << to_string(r.kind) << ','
           << (r.out_group ? "true" : "false") << ',' << r.aggregate.n << ',' << decimal(r.aggregate.median) << ','
           << r.aggregate.median.str() << ',' << decimal(r.aggregate.mean) << ',' << r.aggregate.mean.str() << '\n';
  write_file(dir / "deltas.csv", deltas.str(), written);

  std::ostringstream agents;
  agents << "run_id,agent,party,target,kind,pre,post,delta\n";
  for (const auto& r : summary.agent_deltas)
    agents << csv_field(r.run_id) << ',' << csv_field(r.agent.str()) << ',' << csv_field(r.party) << ','
           << csv_field(r.target.str()) << ',' << to_string(r.kind) << ',' << r.pre << ',' << r.post << ',' << r.delta
           << '\n';
  write_file(dir / "agent_deltas.csv", agents.str(), written);

  std::ostringstream degrees;
  degrees << "run_id,agent,party,type_pre,type_post,degree_pre,degree_post,degree_delta\n";
  for (const auto& r : summary.degree_changes)
    degrees << csv_field(r.run_id) << ',' << csv_field(r.agent.str()) << ',' << csv_field(r.party) << ','
            << to_string(r.type_pre) << ',' << to_string(r.type_post) << ',' << opt(r.pre) << ',' << opt(r.post) << ','
            << opt(r.delta) << '\n';
  write_file(dir / "degrees.csv", degrees.str(), written);

  std::ostringstream adoption;
  adoption << "measure,group,n,share,share_exact\n";
  if (summary.focal_adoption) {
    const auto& a = *summary.focal_adoption;
    for (const auto& [group, share] : a.in_group_share)
      adoption << "in_group," << csv_field(group.str()) << ',' << a.n << ',' << decimal(share) << ',' << share.str()
               << '\n';
    adoption << "polarized,," << a.n << ',' << decimal(a.polarized_share) << ',' << a.polarized_share.str() << '\n';
  }
  write_file(dir / "adoption.csv", adoption.str(), written);

  std::ostringstream words;
  words << "messages,runs,total_words,over_limit,median_words_per_message,median_words_per_run\n";
  words << summary.words.messages << ',' << summary.words.runs << ',' << summary.words.total_words << ','
        << summary.words.over_limit << ',' << decimal(summary.words.median_words_per_message) << ','
        << decimal(summary.words.median_words_per_run) << '\n';
  write_file(dir / "words.csv", words.str(), written);

  std::ostringstream counts;
  counts << "completed,aborted,clamped_answers,focal_excluded\n";
  counts << summary.completed << ',' << summary.aborted << ',' << summary.clamped_answers << ','
         << summary.focal_excluded << '\n';
  write_file(dir / "counts.csv", counts.str(), written);

  if (charts) {
    for (AffectKind kind : {AffectKind::warmth, AffectKind::love, AffectKind::hate}) {
      const std::string svg = render_out_group_chart(summary.agent_deltas, kind);
      if (svg.empty()) continue;
      write_file(dir / ("out_group_" + std::string(to_string(kind)) + ".svg"), svg, written);
    }
  }
  return written;
}

}  // namespace polarsim
