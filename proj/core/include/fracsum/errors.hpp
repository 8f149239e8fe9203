#pragma once

#include <stdexcept>
#include <string>

namespace fracsum {

// Base for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
  public:
    using Error::Error;
};

class DimensionMismatch : public Error
{
  public:
    using Error::Error;
};

class OverflowError : public Error
{
  public:
    using Error::Error;
};

// A computation would exceed its configured work or memory budget.
class BudgetExceeded : public Error
{
  public:
    using Error::Error;
};

class ParseError : public Error
{
  public:
    using Error::Error;
};

}  // namespace fracsum
