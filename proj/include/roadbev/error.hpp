// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace roadbev {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A domain invariant was violated (bad mask shape, non-orthonormal rotation,
// zero cameras, ...). Maps to CLI exit code 4.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed; the message carries line/field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (missing file, short write).
class IoError : public Error {
 public:
  using Error::Error;
};

// The synthetic generator could not place the requested objects in view.
class InfeasibleLayout : public Error {
 public:
  using Error::Error;
};

// Camera optical axis within 1 degree of the frame's vertical axis.
class DegeneratePose : public Error {
 public:
  using Error::Error;
};

// An angle or feature value was NaN or infinite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// Pixel outside the image when sampling a feature map.
class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

// Tensor/table dimensions disagree (embedding rows vs channels, ...).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Position encoding requires an even channel count.
class OddChannelsError : public DimensionMismatch {
 public:
  using DimensionMismatch::DimensionMismatch;
};

// Feature maps fed to aggregation disagree on channel count.
class ChannelMismatch : public DimensionMismatch {
 public:
  using DimensionMismatch::DimensionMismatch;
};

// A mapping hit references a camera with no feature map supplied.
class MissingFeatureMap : public Error {
 public:
  using Error::Error;
};

// Mask length or bitmap resolution does not match the scene's cameras.
class MaskShapeMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// CamMask must keep at least one camera active.
class AllCamerasMasked : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace roadbev
