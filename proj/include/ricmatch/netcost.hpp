#ifndef RICMATCH_NETCOST_HPP
#define RICMATCH_NETCOST_HPP

#include <map>
#include <string>
#include <vector>

#include "ricmatch/matching.hpp"
#include "ricmatch/trace.hpp"

namespace ricmatch {

/// RU-to-RIC link parameters. Per-RU overrides fall back to the defaults.
struct LinkModel {
    double default_bandwidth_bps = 1e9;
    double default_base_latency_s = 1e-3;
    long long record_size_bytes = 64;
    std::map<std::string, double> bandwidth_bps;   // per RU
    std::map<std::string, double> base_latency_s;  // per RU

    double bandwidth(const std::string& ru) const;
    double latency(const std::string& ru) const;
};

/// Epoch time grows linearly with the quantity of training data.
struct ComputeModel {
    double c_per_sample_s = 1e-6;
    double c_fixed_s = 0.0;
};

struct CostReport {
    long long bytes_moved = 0;
    double transfer_delay_s = 0.0;               // max over instances
    std::vector<double> instance_delay_s;        // per plan instance
    std::vector<long long> instance_bytes;       // per plan instance
};

/// Per instance: each source ships round(fraction * n_records) records; source
/// transfers run in parallel (serial aggregation available via the flag).
CostReport transfer_delay(const MatchingPlan& plan, const Trace& trace, const LinkModel& links,
                          bool serial_transfers = false);

double modeled_training_time(std::size_t n_samples, int n_epochs, const ComputeModel& compute);

/// The time unit of the budget sweeps: 100 hoard-strategy epochs over the
/// whole trace.
double normalized_time_unit(const Trace& trace, const ComputeModel& compute);

}  // namespace ricmatch

#endif
