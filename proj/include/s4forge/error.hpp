#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace s4forge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or ill-typed field in a wire document. `path()` is a JSON-pointer-ish
/// location such as "/nodes/3/bbox".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error("schema error at " + (path.empty() ? std::string("/") : path) + ": " + what),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class TreeError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

class EmptyPage : public Error {
 public:
  using Error::Error;
};

class BadExtent : public Error {
 public:
  using Error::Error;
};

class BadRect : public Error {
 public:
  using Error::Error;
};

class VocabMissing : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// Reasons a task constructor declines a page. These are expected on real
// pages and make sample_task fall through to another kind.
enum class TaskErrorCode {
  NoRegion,
  NoImage,
  NoCaption,
  NoGroundableElement,
  NoGroup,
  TooFewElements,
  NoTable,
  NoTitle,
  NoLayout,
  NoTextNode,
  NoTaskPossible,
};

inline std::string_view to_string(TaskErrorCode code) {
  switch (code) {
    case TaskErrorCode::NoRegion: return "NoRegion";
    case TaskErrorCode::NoImage: return "NoImage";
    case TaskErrorCode::NoCaption: return "NoCaption";
    case TaskErrorCode::NoGroundableElement: return "NoGroundableElement";
    case TaskErrorCode::NoGroup: return "NoGroup";
    case TaskErrorCode::TooFewElements: return "TooFewElements";
    case TaskErrorCode::NoTable: return "NoTable";
    case TaskErrorCode::NoTitle: return "NoTitle";
    case TaskErrorCode::NoLayout: return "NoLayout";
    case TaskErrorCode::NoTextNode: return "NoTextNode";
    case TaskErrorCode::NoTaskPossible: return "NoTaskPossible";
  }
  return "?";
}

class TaskError : public Error {
 public:
  explicit TaskError(TaskErrorCode code, const std::string& detail = {})
      : Error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)), code_(code) {}
  TaskErrorCode code() const noexcept { return code_; }

 private:
  TaskErrorCode code_;
};

}  // namespace s4forge
