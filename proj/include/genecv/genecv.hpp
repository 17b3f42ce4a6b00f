#pragma once

// Layered cross-validation estimators around SVM recursive feature
// elimination, with a synthetic-data Bayes oracle for ground truth.

#include "genecv/bayes.hpp"
#include "genecv/centroid.hpp"
#include "genecv/cv.hpp"
#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/folds.hpp"
#include "genecv/matrix.hpp"
#include "genecv/report.hpp"
#include "genecv/rng.hpp"
#include "genecv/selection.hpp"
#include "genecv/svm.hpp"
#include "genecv/synth.hpp"
#include "genecv/version.hpp"
