#pragma once

#include <stdexcept>
#include <string>

namespace fizi {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ImageError : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class LearningError : public Error { public: using Error::Error; };
class PipelineError : public Error { public: using Error::Error; };
class LayoutError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class SourceError : public Error { public: using Error::Error; };
class SinkError : public Error { public: using Error::Error; };

}  // namespace fizi
