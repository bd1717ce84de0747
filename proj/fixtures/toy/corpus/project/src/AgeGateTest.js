"use strict";

const { test, assertTrue, assertFalse } = require("../harness/testkit.js");
const { AgeGate } = require("./AgeGate.js");

test("ageGateAllowsAdults", () => {
  assertTrue(new AgeGate().isAllowed(30));
});

test("ageGateBlocksChildren", () => {
  assertFalse(new AgeGate().isAllowed(5));
});

test("ageGateTeenNeedsConsent", () => {
  assertTrue(new AgeGate().needsParentalConsent(15));
});
