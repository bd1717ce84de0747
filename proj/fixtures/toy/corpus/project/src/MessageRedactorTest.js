"use strict";

const { test, assertEqual } = require("../harness/testkit.js");
const { MessageRedactor } = require("./MessageRedactor.js");

test("redactorHidesPhoneNumber", () => {
  const r = new MessageRedactor();
  assertEqual(r.redact("call 555-1234 now"), "call [phone] now");
});

test("redactorHandlesBatches", () => {
  const r = new MessageRedactor();
  assertEqual(r.redactAll(["a 555-0000", "b"]), ["a [phone]", "b"]);
});
