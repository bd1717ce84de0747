"use strict";

const { test, assertTrue, assertFalse } = require("../harness/testkit.js");
const { PasswordPolicy } = require("./PasswordPolicy.js");

test("policyRejectsShortPassword", () => {
  assertFalse(new PasswordPolicy(8).isAcceptable("abc", "ann"));
});

test("policyAcceptsStrongPassword", () => {
  assertTrue(new PasswordPolicy(8).isAcceptable("correct-horse", "ann"));
});
