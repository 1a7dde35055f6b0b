#include <string>
#include <vector>

#include "litclass/textprep.hpp"

namespace litclass {

const std::vector<std::string>& StopList::english_words() {
  static const std::vector<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
      "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
      "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
      "for", "with", "about", "against", "between", "into", "through", "during", "before",
      "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
      "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren",
      "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn",
      "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn", "would", "could", "also",
      "however", "thus", "therefore", "may", "might", "must", "shall", "within", "without",
      "upon", "via", "among", "whether", "yet", "although", "though", "either", "neither",
      "every", "much", "many", "one", "two", "three"};
  return words;
}

// High-frequency abstract boilerplate that carries no topical signal.
const std::vector<std::string>& StopList::domain_words() {
  static const std::vector<std::string> words = {
      "result",     "results",     "method",   "methods",  "patient",   "patients",
      "study",      "studies",     "background", "objective", "objectives", "conclusion",
      "conclusions", "aim",        "aims",     "purpose",  "using",     "used"};
  return words;
}

}  // namespace litclass
