#pragma once

#include <span>

#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/sharing/model.hpp"

namespace mihkit::sharing {

/// Incorporates shared cluster records into a local cluster set.
///
/// Non-erroneous records join all of their addresses (adding addresses the
/// local set has not seen). Erroneous records join nothing; every resulting
/// cluster they intersect is flagged erroneous. Addresses that were excluded
/// by rectification stay out of any union. The IRIs of records that change
/// `set` are added to incorporated_records.
///
/// Idempotent and independent of record order. Throws ValidationError when a
/// record's currency differs from the set's.
clustering::ClusterSet merge_shared_clusters(const clustering::ClusterSet& set,
                                             std::span<const ClusterRecord> records);

}  // namespace mihkit::sharing
