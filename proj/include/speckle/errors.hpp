#pragma once

#include <stdexcept>
#include <string>

namespace speckle {

// Base of all toolkit errors. Validation errors map to CLI exit code 2,
// analysis errors to exit code 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class AnalysisError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// framestore error variants
class IoError : public Error {
public:
    using Error::Error;
};

class MissingMetadataError : public IoError {
public:
    using IoError::IoError;
};

class MissingFrameError : public IoError {
public:
    MissingFrameError(const std::string& msg, int index) : IoError(msg), frame_index(index) {}
    int frame_index;
};

class MalformedFileError : public IoError {
public:
    using IoError::IoError;
};

class EmptySequenceError : public IoError {
public:
    using IoError::IoError;
};

class DimensionMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TooShortError : public ValidationError {
public:
    TooShortError(const std::string& msg, int required) : ValidationError(msg), required_frames(required) {}
    int required_frames;
};

// stabilizer / pipeline
class DegenerateTraceError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class DegenerateFrameError : public AnalysisError {
public:
    DegenerateFrameError(const std::string& msg, int index = -1) : AnalysisError(msg), frame_index(index) {}
    int frame_index;
};

class InsufficientPeaksError : public AnalysisError {
public:
    InsufficientPeaksError(const std::string& msg, int found) : AnalysisError(msg), peaks_found(found) {}
    int peaks_found;
};

// rheocal / classifier
class CalibrationError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class TrainingError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

} // namespace speckle
