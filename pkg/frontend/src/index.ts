export {
  BridgeError,
  BridgeSession,
  type BridgeOptions,
  type ResetResult,
  type StepResult,
} from "./bridge.js";
