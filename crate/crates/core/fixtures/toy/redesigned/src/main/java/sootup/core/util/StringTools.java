package sootup.core.util;

/** Utility methods for string manipulations commonly used in SootUp. */
public class StringTools {

    /** Returns fromString, but with non-isalpha() characters printed as ('\\' + unicode). */
    public static String getEscapedStringOf(String fromString) {
        StringBuilder whole = new StringBuilder();
        for (char ch : fromString.toCharArray()) {
            // escape everything outside printable ascii
            if (ch >= ' ' && ch <= '~' && ch != '\\') {
                whole.append(ch);
            } else {
                whole.append("\\u").append(String.format("%04x", (int) ch));
            }
        }
        return whole.toString();
    }

    /** Returns fromString, but with certain characters printed as if they were in a Java string literal. */
    public static String getQuotedStringOf(String fromString) {
        final int fromStringLen = fromString.length();
        StringBuilder toStringBuffer = new StringBuilder(fromStringLen + 2);
        toStringBuffer.append('"');
        for (int i = 0; i < fromStringLen; i++) {
            char ch = fromString.charAt(i);
            if (ch == '"' || ch == '\\') {
                toStringBuffer.append('\\');
            }
            toStringBuffer.append(ch);
        }
        return toStringBuffer.append('"').toString();
    }
}
