#pragma once

#include "cuspflow/analysis.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/integrator.hpp"

#include <string>
#include <vector>

namespace cuspflow {

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

/// snapshots.csv, header exactly: t,x,phi,Phi
void write_snapshots_csv(const std::string& path, const LagrangianGrid& grid,
                         const std::vector<Snapshot>& snapshots);

/// theta.csv, header exactly: t,y,theta
void write_theta_csv(const std::string& path, const std::vector<EulerianProfile>& profiles);

struct SnapshotFile {
    std::vector<double> x; // node set recovered from the t-blocks
    std::vector<Snapshot> snapshots;
};

SnapshotFile read_snapshots_csv(const std::string& path);

} // namespace cuspflow
