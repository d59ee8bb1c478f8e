#include "roomsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <locale>
#include <sstream>
#include <system_error>

#include "roomsim/error.hpp"

namespace roomsim {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move output into place at '" + path.string() + "'");
  }
}

void write_signal_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& samples,
                      double fs) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "sample(fs=" << fs << ")";
  for (Eigen::Index c = 0; c < samples.rows(); ++c) os << ",ch" << c;
  os << '\n';
  for (Eigen::Index t = 0; t < samples.cols(); ++t) {
    os << t;
    for (Eigen::Index c = 0; c < samples.rows(); ++c) os << ',' << samples(c, t);
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

}  // namespace roomsim
