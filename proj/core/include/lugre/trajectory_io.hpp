#pragma once

#include <filesystem>
#include <string_view>

#include "lugre/sim.hpp"

namespace lugre {

/// Fixed column order of the trajectory CSV.
inline constexpr std::string_view kTrajectoryCsvHeader =
    "t,theta,w,z,z_hat,w_hat,F,F_hat,u,v,e_z,e_w,e_f,ref_raw,ref_filtered,track_err,V,V_dot";

/// Writes values with 17 significant digits so a re-parse reproduces every
/// double exactly; NaN channels become empty cells.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Inverse of write_trajectory_csv; empty cells read back as quiet NaN.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace lugre
