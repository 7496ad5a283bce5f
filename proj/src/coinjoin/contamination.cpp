#include "mihkit/coinjoin/contamination.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mihkit/error.hpp"

namespace mihkit::coinjoin {

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

double log10_or_zero(std::uint64_t n) {
    return n == 0 ? 0.0 : std::log10(static_cast<double>(n));
}

}  // namespace

ContaminationReport contamination_report(const clustering::ClusterSet& clusters, const ScanResult& scan) {
    if (!evidence::same_ledger_state(clusters.provenance(), scan.provenance)) {
        throw ValidationError("cluster set (" + clusters.provenance().block_hash + ") and scan (" +
                              scan.provenance.block_hash + ") derive from different ledger states");
    }

    std::unordered_map<clustering::ClusterId, std::uint64_t> cj_addresses;
    std::unordered_map<clustering::ClusterId, std::uint64_t> cj_txs;
    for (const auto& a : scan.coinjoin_input_addresses) {
        if (auto id = clusters.find(a)) ++cj_addresses[*id];
    }
    for (const auto& [txid, inputs] : scan.coinjoin_inputs) {
        std::unordered_set<clustering::ClusterId> touched;
        for (const auto& a : inputs) {
            if (auto id = clusters.find(a)) touched.insert(*id);
        }
        for (const auto& id : touched) ++cj_txs[id];
    }

    ContaminationReport report;
    auto& s = report.summary;
    std::uint64_t sum_addr = 0, sum_txs = 0;
    for (const auto& [id, c] : clusters.clusters()) {
        ContaminationRow row;
        row.cluster_id = id;
        row.n_addresses = c.addresses.size();
        if (auto it = cj_addresses.find(id); it != cj_addresses.end()) row.n_cj_addresses = it->second;
        if (auto it = cj_txs.find(id); it != cj_txs.end()) row.n_cj_txs = it->second;
        row.ratio = static_cast<double>(row.n_cj_addresses) / static_cast<double>(row.n_addresses);
        if (row.n_cj_addresses > 0) ++s.n_affected;
        sum_addr += row.n_cj_addresses;
        sum_txs += row.n_cj_txs;
        report.rows.push_back(std::move(row));
    }
    s.n_clusters = report.rows.size();
    if (s.n_clusters > 0) {
        s.affected_fraction = double(s.n_affected) / double(s.n_clusters);
        s.mean_cj_addresses_all = double(sum_addr) / double(s.n_clusters);
        s.mean_cj_txs_all = double(sum_txs) / double(s.n_clusters);
    }
    if (s.n_affected > 0) {
        // unaffected clusters contribute zero to both sums
        s.mean_cj_addresses_affected = double(sum_addr) / double(s.n_affected);
        s.mean_cj_txs_affected = double(sum_txs) / double(s.n_affected);
    }
    return report;
}

evidence::Document to_json(const ContaminationSummary& s) {
    return {{"n_clusters", s.n_clusters},
            {"n_affected", s.n_affected},
            {"affected_fraction", s.affected_fraction},
            {"mean_cj_addresses_affected", s.mean_cj_addresses_affected},
            {"mean_cj_txs_affected", s.mean_cj_txs_affected},
            {"mean_cj_addresses_all", s.mean_cj_addresses_all},
            {"mean_cj_txs_all", s.mean_cj_txs_all}};
}

RenderedReport render_report(const ContaminationReport& report, std::size_t top_n) {
    if (top_n == 0) throw InputError("top_n must be >= 1");
    std::vector<const ContaminationRow*> ranked;
    for (const auto& r : report.rows) ranked.push_back(&r);
    std::sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
        if (a->n_addresses != b->n_addresses) return a->n_addresses > b->n_addresses;
        return a->cluster_id < b->cluster_id;
    });
    if (ranked.size() > top_n) ranked.resize(top_n);

    RenderedReport out;
    std::ostringstream csv;
    csv << "rank,cluster_id,n_addresses,n_cj_addresses,n_cj_txs,ratio\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = *ranked[i];
        csv << (i + 1) << ',' << r.cluster_id.str() << ',' << r.n_addresses << ',' << r.n_cj_addresses << ','
            << r.n_cj_txs << ',' << shortest(r.ratio) << '\n';
    }
    out.csv = csv.str();

    constexpr int kLeft = 50, kTop = 20, kPlotH = 240, kSlot = 12, kBarW = 5;
    double max_log = 1.0;
    for (auto* r : ranked) max_log = std::max(max_log, std::ceil(log10_or_zero(r->n_addresses)));
    const int width = kLeft + kSlot * static_cast<int>(ranked.size()) + 20;
    const int height = kTop + kPlotH + 40;
    const int base = kTop + kPlotH;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<title>#Addresses in the largest clusters vs. #addresses involved in CoinJoins (log scale)</title>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << base << "\" x2=\"" << width - 10 << "\" y2=\"" << base
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << base
        << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= static_cast<int>(max_log); ++tick) {
        const double y = base - kPlotH * tick / max_log;
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed2(y + 4)
            << "\" font-size=\"10\" text-anchor=\"end\">1e" << tick << "</text>\n";
    }
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = *ranked[i];
        const int x = kLeft + kSlot * static_cast<int>(i) + 1;
        const double h_all = kPlotH * log10_or_zero(r.n_addresses) / max_log;
        const double h_cj = kPlotH * log10_or_zero(r.n_cj_addresses) / max_log;
        svg << "<rect class=\"bar-addresses\" x=\"" << x << "\" y=\"" << fixed2(base - h_all) << "\" width=\""
            << kBarW << "\" height=\"" << fixed2(h_all) << "\" fill=\"#4c72b0\"><title>rank " << i + 1 << ": "
            << r.n_addresses << " addresses</title></rect>\n"
            << "<rect class=\"bar-coinjoin\" x=\"" << x + kBarW << "\" y=\"" << fixed2(base - h_cj)
            << "\" width=\"" << kBarW << "\" height=\"" << fixed2(h_cj) << "\" fill=\"#dd8452\"><title>rank "
            << i + 1 << ": " << r.n_cj_addresses << " CoinJoin input addresses</title></rect>\n";
    }
    svg << "<text x=\"" << kLeft << "\" y=\"" << height - 8
        << "\" font-size=\"10\">cluster rank (by size); bars: all addresses, CoinJoin inputs</text>\n"
        << "</svg>\n";
    out.svg = svg.str();
    return out;
}

std::vector<ContaminationRow> parse_report_csv(std::string_view csv) {
    std::vector<ContaminationRow> rows;
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != "rank,cluster_id,n_addresses,n_cj_addresses,n_cj_txs,ratio") {
        throw InputError("unexpected report CSV header");
    }
    auto parse_u64 = [](std::string_view s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) throw InputError("bad integer '" + std::string(s) + "'");
        return v;
    };
    while (std::getline(in, line)) {
        std::vector<std::string_view> f;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
            f.push_back(rest.substr(0, pos));
        }
        f.push_back(rest);
        if (f.size() != 6) throw InputError("report CSV row must have 6 fields");
        if (parse_u64(f[0]) != rows.size() + 1) throw InputError("report CSV ranks out of order");
        ContaminationRow r;
        r.cluster_id = clustering::ClusterId(std::string(f[1]));
        r.n_addresses = parse_u64(f[2]);
        r.n_cj_addresses = parse_u64(f[3]);
        r.n_cj_txs = parse_u64(f[4]);
        auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), r.ratio);
        if (ec != std::errc{} || p != f[5].data() + f[5].size()) throw InputError("bad ratio");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace mihkit::coinjoin
