#include "ricmatch/netcost.hpp"

#include <algorithm>
#include <cmath>

namespace ricmatch {

double LinkModel::bandwidth(const std::string& ru) const {
    auto it = bandwidth_bps.find(ru);
    return it == bandwidth_bps.end() ? default_bandwidth_bps : it->second;
}

double LinkModel::latency(const std::string& ru) const {
    auto it = base_latency_s.find(ru);
    return it == base_latency_s.end() ? default_base_latency_s : it->second;
}

CostReport transfer_delay(const MatchingPlan& plan, const Trace& trace, const LinkModel& links,
                          bool serial_transfers) {
    const auto parts = partition_by_ru(trace);
    CostReport report;
    for (const auto& inst : plan.instances) {
        double inst_delay = 0.0;
        long long inst_bytes = 0;
        for (const auto& src : inst.training_sources) {
            auto it = parts.find(src.ru_id);
            if (it == parts.end())
                throw DataError("transfer_delay: RU '" + src.ru_id + "' absent from trace");
            auto n = static_cast<long long>(
                std::llround(src.fraction * static_cast<double>(it->second.size())));
            n = std::max<long long>(n, 1);  // a source always ships at least one record
            const long long volume = n * links.record_size_bytes;
            const double delay =
                links.latency(src.ru_id) + static_cast<double>(volume) * 8.0 / links.bandwidth(src.ru_id);
            inst_bytes += volume;
            inst_delay = serial_transfers ? inst_delay + delay : std::max(inst_delay, delay);
        }
        report.instance_delay_s.push_back(inst_delay);
        report.instance_bytes.push_back(inst_bytes);
        report.bytes_moved += inst_bytes;
        report.transfer_delay_s = std::max(report.transfer_delay_s, inst_delay);
    }
    return report;
}

double modeled_training_time(std::size_t n_samples, int n_epochs, const ComputeModel& compute) {
    if (n_samples < 1) throw DataError("modeled_training_time: n_samples must be >= 1");
    if (n_epochs < 0) throw DataError("modeled_training_time: n_epochs must be >= 0");
    return static_cast<double>(n_epochs) *
           (compute.c_fixed_s + compute.c_per_sample_s * static_cast<double>(n_samples));
}

double normalized_time_unit(const Trace& trace, const ComputeModel& compute) {
    if (trace.size() == 0) throw DataError("normalized_time_unit: empty trace");
    return modeled_training_time(trace.size(), 100, compute);
}

}  // namespace ricmatch
