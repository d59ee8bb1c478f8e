#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace roomsim {

// Header "sample(fs=<fs>),ch0,ch1,...", then one row per sample: index followed
// by one value per channel (rows of `samples`).
void write_signal_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      double fs);

// Generic table: header row, then rows of numbers printed with 17 digits.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace roomsim
