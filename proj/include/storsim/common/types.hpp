#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace storsim
{

// simulation time in whole seconds since simulation start
using TickType = std::uint64_t;

// data volumes in whole bytes
using SpaceType = std::uint64_t;

using IdType = std::uint64_t;
using FileId = std::uint32_t;
using ElementId = std::uint32_t;
using LinkId = std::uint32_t;

constexpr TickType SECONDS_PER_HOUR = 3600;
constexpr TickType SECONDS_PER_DAY = 24 * SECONDS_PER_HOUR;
constexpr TickType SECONDS_PER_MONTH = 30 * SECONDS_PER_DAY;

constexpr double BYTES_PER_GIB = 1024.0 * 1024.0 * 1024.0;
constexpr double BYTES_PER_GB = 1000.0 * 1000.0 * 1000.0;
constexpr double BYTES_PER_MB = 1000.0 * 1000.0;

class SimError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public SimError
{
public:
    using SimError::SimError;
};

class ModelError : public SimError
{
public:
    using SimError::SimError;
};

class DuplicateReplicaError : public ModelError
{
public:
    using ModelError::ModelError;
};

class InsufficientStorageError : public ModelError
{
public:
    using ModelError::ModelError;
};

class ReplicaBusyError : public ModelError
{
public:
    using ModelError::ModelError;
};

class NoSuchLinkError : public ModelError
{
public:
    using ModelError::ModelError;
};

} // namespace storsim
