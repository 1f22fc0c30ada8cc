#pragma once

#include <string>
#include <vector>

#include "spinboson/types.hpp"

namespace spinboson {

enum class AuditPolicy { WarnAndContinue, Strict };

struct AuditRecord {
    std::string name;
    int scale = -1;        // -1 when not tied to a scale
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Collects bound audits; in strict mode a failing audit throws.
class AuditSink {
  public:
    explicit AuditSink(AuditPolicy policy = AuditPolicy::WarnAndContinue)
        : policy_(policy) {}

    void record(const std::string& name, int scale, double measured, double bound) {
        AuditRecord r{name, scale, measured, bound, measured <= bound};
        records_.push_back(r);
        if (policy_ == AuditPolicy::Strict && !r.pass)
            throw AuditFailure("audit failed: " + name + " measured " +
                               std::to_string(measured) + " exceeds bound " +
                               std::to_string(bound));
    }

    const std::vector<AuditRecord>& records() const { return records_; }
    bool all_pass() const {
        for (const auto& r : records_)
            if (!r.pass) return false;
        return true;
    }

  private:
    AuditPolicy policy_;
    std::vector<AuditRecord> records_;
};

}  // namespace spinboson
