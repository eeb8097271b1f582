#pragma once

#include <stdexcept>
#include <string>

namespace botdetect {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A log record that does not fit the dialect grammar. Ingest counts these
/// and moves on.
class MalformedLine : public Error {
public:
    MalformedLine(std::string column, std::string reason)
        : Error(column + ": " + reason), column_(std::move(column)), reason_(std::move(reason)) {}

    const std::string& column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string column_;
    std::string reason_;
};

class InvalidRule : public Error { using Error::Error; };
class InvalidRegex : public Error { using Error::Error; };
class InvalidConfig : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };
class EmptyCorpus : public Error { using Error::Error; };
class EmptyDocument : public Error { using Error::Error; };
class InvalidHyperparameter : public Error { using Error::Error; };
class EmptyDataset : public Error { using Error::Error; };
class SingleClassInput : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class LengthMismatch : public Error { using Error::Error; };

class NegativeFeature : public Error {
public:
    explicit NegativeFeature(std::string name)
        : Error("negative value in feature '" + name + "'"), name_(std::move(name)) {}
    const std::string& feature() const noexcept { return name_; }

private:
    std::string name_;
};

}  // namespace botdetect
