#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/coinjoin/scan.hpp"

namespace mihkit::coinjoin {

struct ContaminationRow {
    clustering::ClusterId cluster_id;
    std::uint64_t n_addresses = 0;
    std::uint64_t n_cj_addresses = 0;  // members that were inputs of a detected CoinJoin
    std::uint64_t n_cj_txs = 0;        // detected CoinJoins with >= 1 input in the cluster
    double ratio = 0.0;                // n_cj_addresses / n_addresses

    friend bool operator==(const ContaminationRow&, const ContaminationRow&) = default;
};

struct ContaminationSummary {
    std::uint64_t n_clusters = 0;
    std::uint64_t n_affected = 0;
    double affected_fraction = 0.0;
    // means over affected clusters
    double mean_cj_addresses_affected = 0.0;
    double mean_cj_txs_affected = 0.0;
    // means over all clusters
    double mean_cj_addresses_all = 0.0;
    double mean_cj_txs_all = 0.0;
};

struct ContaminationReport {
    std::vector<ContaminationRow> rows;  // cluster id order
    ContaminationSummary summary;
};

/// Throws ValidationError when the two inputs were derived from different
/// ledger states (currency, tip hash or height differ).
ContaminationReport contamination_report(const clustering::ClusterSet& clusters, const ScanResult& scan);

evidence::Document to_json(const ContaminationSummary& summary);

struct RenderedReport {
    std::string csv;
    std::string svg;
};

/// Largest top_n clusters (size descending, id ascending on ties) as CSV
/// and as a static SVG 1.1 bar chart on a log10 scale.
RenderedReport render_report(const ContaminationReport& report, std::size_t top_n);

/// Parses CSV produced by render_report back into rows (rank order).
std::vector<ContaminationRow> parse_report_csv(std::string_view csv);

}  // namespace mihkit::coinjoin
