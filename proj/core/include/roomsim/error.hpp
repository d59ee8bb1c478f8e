#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roomsim {

// Machine-readable error categories. The CLI prints the code name on stderr.
enum class ErrorCode {
  InvalidWall,
  InvalidGeometry,
  Config,
  InvalidScene,
  Singularity,
  Usage,
  DegenerateTarget,
  SceneSchema,
  ScenePosition,
  SceneRange,
  SceneFile,
  Io,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidWall: return "INVALID_WALL";
    case ErrorCode::InvalidGeometry: return "INVALID_GEOMETRY";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::InvalidScene: return "INVALID_SCENE";
    case ErrorCode::Singularity: return "SINGULARITY";
    case ErrorCode::Usage: return "USAGE";
    case ErrorCode::DegenerateTarget: return "DEGENERATE_TARGET";
    case ErrorCode::SceneSchema: return "SCENE_SCHEMA";
    case ErrorCode::ScenePosition: return "SCENE_POSITION";
    case ErrorCode::SceneRange: return "SCENE_RANGE";
    case ErrorCode::SceneFile: return "SCENE_FILE";
    case ErrorCode::Io: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace roomsim
