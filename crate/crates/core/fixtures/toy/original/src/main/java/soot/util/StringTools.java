package soot.util;

/** Utility methods for string manipulations commonly used in Soot. */
public class StringTools {

    /** Convenience field storing the system line separator. */
    public static final String lineSeparator = System.getProperty("line.separator");

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
        StringBuilder toStringBuffer = new StringBuilder(fromString.length() + 2);
        toStringBuffer.append('"');
        for (char ch : fromString.toCharArray()) {
            if (ch == '"' || ch == '\\') {
                toStringBuffer.append('\\');
            }
            toStringBuffer.append(ch);
        }
        return toStringBuffer.append('"').toString();
    }
}
